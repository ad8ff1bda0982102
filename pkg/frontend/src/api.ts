/**
 * Typed client for the prediction service.  The fetch function is injected
 * so tests can intercept every request; responses are returned as parsed
 * JSON with no numeric post-processing.
 */

export interface ColumnInfo {
  name: string;
  key: string;
  unit: string;
  kind: string;
  min: number;
  max: number;
}

export interface SchemaResponse {
  features: ColumnInfo[];
  targets: ColumnInfo[];
  model_version: string;
}

export interface PredictResponse {
  features: Record<string, number>;
  predictions: Record<string, number>;
  extrapolation: Record<string, boolean>;
  model_version: string;
}

export interface ExplainEntry {
  target: string;
  base_value: number;
  prediction: number;
  values: Record<string, number>;
  order: string[];
  group_percent: Record<string, number> | null;
}

export interface ExplainResponse {
  explanations: ExplainEntry[];
  model_version: string;
}

export interface ParetoSolution {
  decision: Record<string, number>;
  objectives: Record<string, number>;
}

export interface OptimizeResponse {
  solutions: ParetoSolution[];
  decision_ranges: Record<string, [number, number]>;
  objective_ranges: Record<string, [number, number]>;
  model_version: string;
}

export interface OptimizeRequest {
  bounds?: Record<string, [number, number]>;
  swarm_size?: number;
  iterations?: number;
  archive_capacity?: number;
  seed?: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (typeof body.detail === 'string') return body.detail;
    if (Array.isArray(body.detail)) {
      return body.detail
        .map((d: { field?: string; message?: string }) => `${d.field}: ${d.message}`)
        .join('; ');
    }
  } catch {
    /* fall through to the generic message */
  }
  return `request failed with status ${resp.status}`;
}

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    if (!resp.ok) throw new ApiError(resp.status, await parseError(resp));
    return (await resp.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw new ApiError(resp.status, await parseError(resp));
    return (await resp.json()) as T;
  }

  schema(): Promise<SchemaResponse> {
    return this.get('/api/schema');
  }

  predict(features: Record<string, number>): Promise<PredictResponse> {
    return this.post('/api/predict', { features });
  }

  explain(features: Record<string, number>): Promise<ExplainResponse> {
    return this.post('/api/explain', { features });
  }

  optimize(request: OptimizeRequest): Promise<OptimizeResponse> {
    return this.post('/api/optimize', request);
  }
}
