// Thin client for the analytics service.
//
// query() is superseding: if a newer query starts before an older one
// resolves, the older result is dropped (returns null) so a slow response
// can never overwrite a fresher view.

import { Dimensions, MetricInfo, QueryRequest, QueryResponse } from "./types";

export class ApiError extends Error {
    constructor(readonly status: number, detail: string) {
        super(`HTTP ${status}: ${detail}`);
    }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
    private querySequence = 0;

    constructor(
        private readonly base: string = "",
        private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    ) {}

    async metrics(): Promise<MetricInfo[]> {
        return this.getJson("/api/metrics");
    }

    async dimensions(metric: string): Promise<Dimensions> {
        return this.getJson(`/api/dimensions?metric=${encodeURIComponent(metric)}`);
    }

    /** Run a query; resolves null if a newer query superseded this one. */
    async query(request: QueryRequest): Promise<QueryResponse | null> {
        const sequence = ++this.querySequence;
        const response = await this.post("/api/query", request);
        if (sequence !== this.querySequence) {
            return null;
        }
        await this.raiseForStatus(response);
        return (await response.json()) as QueryResponse;
    }

    /** Fetch the filtered rows behind a query as CSV text. */
    async exportCsv(request: QueryRequest): Promise<string> {
        const response = await this.post("/api/export", request);
        await this.raiseForStatus(response);
        return response.text();
    }

    private async getJson<T>(path: string): Promise<T> {
        const response = await this.fetchFn(this.base + path);
        await this.raiseForStatus(response);
        return (await response.json()) as T;
    }

    private post(path: string, body: unknown): Promise<Response> {
        return this.fetchFn(this.base + path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }

    private async raiseForStatus(response: Response): Promise<void> {
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const payload = await response.json();
                if (payload && typeof payload.detail !== "undefined") {
                    detail = JSON.stringify(payload.detail);
                }
            } catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(response.status, detail);
        }
    }
}
