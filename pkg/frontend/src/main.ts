/**
 * Controller: fetch a task, collect verdicts, submit, advance.
 *
 * Network failures land on a retry banner without touching persisted edits;
 * server-side rejections surface inline and keep the screen as it was.
 * Keyboard: 1-5 pick a label on the focused span (coarse), arrow up/down
 * move the selected candidate (fine).
 */

import { ApiClient, ApiError } from './api.js';
import type { Task } from './api.js';
import { TaskEditState } from './state.js';
import { refreshControls, renderCompletion, renderRetry, renderTask, showError } from './view.js';

export class ReviewController {
  private state: TaskEditState | null = null;
  private activeSpan = 0;

  constructor(
    private api: ApiClient,
    private root: HTMLElement,
    private storage: Storage | null = null,
  ) {}

  async start(): Promise<void> {
    await this.loadNext();
  }

  private handlers() {
    return {
      onLabel: (spanIndex: number, label: string) => {
        this.state?.setLabel(spanIndex, label);
        this.activeSpan = spanIndex;
        refreshControls(this.root, this.state as TaskEditState);
      },
      onMove: (spanIndex: number, from: number, to: number) => {
        if (!this.state) return;
        this.state.move(spanIndex, from, to);
        renderTask(this.root, this.state, this.handlers());
      },
      onSuggest: (spanIndex: number, type: string) => {
        if (!this.state) return;
        this.state.suggest(spanIndex, type);
        renderTask(this.root, this.state, this.handlers());
      },
      onSubmit: () => {
        void this.submit();
      },
      onRetry: () => {
        void this.loadNext();
      },
    };
  }

  private async loadNext(): Promise<void> {
    let response;
    try {
      response = await this.api.nextTask();
    } catch (error) {
      // network trouble or server error: edits stay in storage untouched
      renderRetry(this.root, error instanceof Error ? error.message : String(error), this.handlers());
      return;
    }
    if (response.task === null) {
      this.state = null;
      renderCompletion(this.root, response.progress);
      return;
    }
    this.show(response.task);
  }

  private show(task: Task): void {
    this.state = new TaskEditState(task, this.api.annotator, this.storage);
    this.activeSpan = task.spans[0]?.span_index ?? 0;
    renderTask(this.root, this.state, this.handlers());
  }

  private async submit(): Promise<void> {
    if (!this.state || !this.state.isComplete()) return;
    try {
      await this.api.submit(this.state.task.task_id, this.state.verdicts());
    } catch (error) {
      if (error instanceof ApiError) {
        showError(this.root, error.message); // rejection: keep edits on screen
        return;
      }
      renderRetry(this.root, error instanceof Error ? error.message : String(error), this.handlers());
      return;
    }
    this.state.clearPersisted();
    await this.loadNext();
  }

  /** Keyboard shortcuts; bind once per page. */
  handleKey(event: KeyboardEvent): void {
    if (!this.state) return;
    const target = event.target as HTMLElement | null;
    if (target && target.tagName === 'INPUT') return;
    if (this.state.task.kind === 'coarse' && /^[1-9]$/.test(event.key)) {
      const choices = this.state.choicesFor(this.activeSpan);
      const choice = choices[Number(event.key) - 1];
      if (choice) {
        this.state.setLabel(this.activeSpan, choice);
        refreshControls(this.root, this.state);
      }
    }
    if (this.state.task.kind === 'coarse' && event.key === 'Tab') {
      const spans = this.state.task.spans.map((s) => s.span_index);
      const at = spans.indexOf(this.activeSpan);
      this.activeSpan = spans[(at + 1) % spans.length] ?? this.activeSpan;
    }
  }
}

export function bootstrap(window: Window & typeof globalThis): ReviewController {
  const params = new URLSearchParams(window.location.search);
  const annotator = params.get('annotator') ?? 'anon';
  const root = window.document.getElementById('app');
  if (!root) throw new Error('missing #app element');
  const controller = new ReviewController(new ApiClient(annotator), root, window.localStorage);
  window.document.addEventListener('keydown', (event) => controller.handleKey(event));
  void controller.start();
  return controller;
}

declare global {
  interface Window {
    __NERTC_TEST__?: boolean;
  }
}

if (typeof window !== 'undefined' && !window.__NERTC_TEST__) {
  bootstrap(window);
}
