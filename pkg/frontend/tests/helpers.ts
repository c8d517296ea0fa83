// Shared fixtures and a fake fetch wired to them.
//
// The fixtures are verbatim service responses for the golden summary tables,
// so assertions against them are assertions against real API output.

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { QueryRequest, QueryResponse } from "../src/types";

const FIXTURE_DIR = join(__dirname, "fixtures");

export function fixtureText(name: string): string {
    return readFileSync(join(FIXTURE_DIR, name), "utf-8");
}

export function fixtureJson<T>(name: string): T {
    return JSON.parse(fixtureText(name)) as T;
}

export const SPEEDING_REQUEST = fixtureJson<QueryRequest>("query_speeding_request.json");
export const SPEEDING_RESPONSE = fixtureJson<QueryResponse>("query_speeding_response.json");

export interface RecordedCall {
    url: string;
    method: string;
    body: unknown;
}

export interface FakeService {
    fetch: (input: string, init?: RequestInit) => Promise<Response>;
    calls: RecordedCall[];
    queries: () => RecordedCall[];
}

/** A fetch replacement serving the fixture files like the real service. */
export function fakeService(): FakeService {
    const calls: RecordedCall[] = [];
    const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
        const method = init?.method ?? "GET";
        const body = typeof init?.body === "string" ? JSON.parse(init.body) : null;
        calls.push({ url: input, method, body });

        if (input === "/api/metrics") {
            return jsonResponse(fixtureText("metrics.json"));
        }
        if (input.startsWith("/api/dimensions?metric=speeding")) {
            return jsonResponse(fixtureText("dimensions_speeding.json"));
        }
        if (input === "/api/query" && method === "POST") {
            return jsonResponse(fixtureText("query_speeding_response.json"));
        }
        if (input === "/api/export" && method === "POST") {
            return new Response(fixtureText("export_speeding.csv"), {
                status: 200,
                headers: { "Content-Type": "text/csv" },
            });
        }
        return jsonResponse(JSON.stringify({ detail: `no route for ${input}` }), 404);
    };
    return { fetch: fetchFn, calls, queries: () => calls.filter(c => c.url === "/api/query") };
}

function jsonResponse(text: string, status = 200): Response {
    return new Response(text, {
        status,
        headers: { "Content-Type": "application/json" },
    });
}

/** Minimal window stand-in whose history writes feed back into location. */
export function fakeWindow(search = ""): Window {
    const win = {
        location: { search },
        history: {
            replaceState(_data: unknown, _title: string, url: string) {
                const idx = url.indexOf("?");
                win.location.search = idx >= 0 ? url.slice(idx) : "";
            },
        },
        addEventListener() {},
    };
    return win as unknown as Window;
}

/** Let queued promise callbacks and timers run. */
export async function flush(turns = 5): Promise<void> {
    for (let i = 0; i < turns; i++) {
        await new Promise(resolve => setTimeout(resolve, 0));
    }
}
