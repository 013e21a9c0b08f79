/**
 * Typed client for the adjudication service API.
 *
 * All shapes mirror the server payloads verbatim; the UI never invents
 * labels or candidates beyond what a task carries.
 */

export interface TaskSpan {
  span_index: number;
  start: number;
  end: number;
  surface: string[];
  current: string;
  candidates: string[];
  choices?: string[];
}

export interface Task {
  task_id: number;
  kind: 'coarse' | 'fine';
  domain: string;
  tokens: string[];
  tags: string[];
  spans: TaskSpan[];
}

export interface Progress {
  tasks: number;
  log_entries: number;
  judged: Record<string, number>;
}

export interface NextResponse {
  task: Task | null;
  progress: Progress;
}

export interface Verdict {
  span: number;
  label?: string;
  ranking?: string[];
}

export interface Receipt {
  seq: number;
  annotator: string;
  task_id: number;
}

/** Server-side rejection (4xx) carrying the server's reason. */
export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let message = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body.error) message = body.error;
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(message, response.status);
}

export class ApiClient {
  constructor(
    readonly annotator: string,
    readonly baseUrl: string = '',
  ) {}

  async nextTask(): Promise<NextResponse> {
    const url = `${this.baseUrl}/api/tasks/next?annotator=${encodeURIComponent(this.annotator)}`;
    const response = await fetch(url);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as NextResponse;
  }

  async submit(taskId: number, verdicts: Verdict[]): Promise<Receipt> {
    const response = await fetch(`${this.baseUrl}/api/judgments`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ annotator: this.annotator, task_id: taskId, verdicts }),
    });
    if (!response.ok) throw await parseError(response);
    const body = (await response.json()) as { receipt: Receipt };
    return body.receipt;
  }

  async progress(): Promise<Progress> {
    const response = await fetch(`${this.baseUrl}/api/progress`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as Progress;
  }
}
