/** Typed client for the segmentation service. All numeric results come
 * from the server; the UI never recomputes energies. */

import type { StrokePayload } from "./scribble.js";

export interface SegmentParams {
  p: number;
  beta: number;
  lambda: number;
  mode: "magnitude" | "signed";
  probing: boolean;
}

export interface SegmentStats {
  energy: number;
  lower_bound: number;
  unlabeled_count: number;
  runtime_ms: number;
}

export interface SegmentResponse {
  mask: string; // base64 PNG
  stats: SegmentStats;
  params: Record<string, unknown>;
}

export interface CorpusCase {
  name: string;
  width: number;
  height: number;
  image: string; // base64 PNG
  truth: string;
  seeds: { fg: Array<[number, number]>; bg: Array<[number, number]> };
  description: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function handle<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = `${resp.status} ${resp.statusText}`;
    try {
      const body = await resp.json();
      if (typeof body.detail === "string") {
        detail = body.detail;
      }
    } catch {
      // no JSON body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class Client {
  constructor(private base = "") {}

  async segment(
    image: string,
    strokes: StrokePayload[],
    params: SegmentParams,
  ): Promise<SegmentResponse> {
    const resp = await fetch(`${this.base}/api/segment`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ image, seeds: { strokes }, params }),
    });
    return handle<SegmentResponse>(resp);
  }

  async corpusNames(): Promise<string[]> {
    return handle<string[]>(await fetch(`${this.base}/api/corpus`));
  }

  async corpusCase(name: string): Promise<CorpusCase> {
    return handle<CorpusCase>(await fetch(`${this.base}/api/corpus/${name}`));
  }
}
