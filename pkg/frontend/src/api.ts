/** Typed fetch client for the blind-evaluation service API. */

export interface ResultItem {
  position: number;
  permalink: string;
  weblog: string;
  snippet: string;
  ts: number;
}

export interface SearchResponse {
  query_id: string;
  results: ResultItem[];
}

export interface MethodStats {
  count: number;
  mean_si: number;
  std_si: number;
}

export interface PairwiseTest {
  a: string;
  b: string;
  t?: number;
  df?: number;
  p?: number;
  error?: string;
}

export interface MetricsResponse {
  methods: Record<string, MethodStats>;
  pairwise: PairwiseTest[];
  excluded: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function getJson<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && body.detail) detail = String(body.detail);
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(private baseUrl = "") {}

  search(query: string, user: string): Promise<SearchResponse> {
    const params = new URLSearchParams({ q: query, user });
    return getJson<SearchResponse>(`${this.baseUrl}/api/search?${params}`);
  }

  click(queryId: string, position: number, permalink: string): Promise<void> {
    return getJson(`${this.baseUrl}/api/click`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query_id: queryId, position, permalink }),
    });
  }

  metrics(): Promise<MetricsResponse> {
    return getJson<MetricsResponse>(`${this.baseUrl}/api/metrics`);
  }
}
