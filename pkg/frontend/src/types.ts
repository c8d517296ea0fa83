// Payload shapes for the summary-table analytics API.

export type Mode = "miles" | "percent";

export interface MetricInfo {
    metric: string;
    total_miles: number;
    n_drivers: number;
}

// Dimension name -> observed values, as served by /api/dimensions.
export type Dimensions = Record<string, string[]>;

export interface QueryRequest {
    metric: string;
    filters: Record<string, string[]>;
    facet: string | null;
    mode: Mode;
}

export interface StepPoint {
    bin_index: number;
    label: string;
    miles: number;
    percent: number;
}

export interface StepSeries {
    facet_value: string;
    total_miles: number;
    points: StepPoint[];
}

export interface BoxOutlier {
    driver_id: string;
    percent: number;
}

export interface BoxStats {
    bin_index: number;
    label: string;
    n_drivers: number;
    min_whisker: number;
    q1: number;
    median: number;
    q3: number;
    max_whisker: number;
    outliers: BoxOutlier[];
}

export interface BoxGroup {
    facet_value: string;
    stats: BoxStats[];
}

export interface QueryResponse {
    metric: string;
    mode: Mode;
    total_miles: number;
    n_drivers: number;
    step: StepSeries[];
    box: BoxGroup[];
}
