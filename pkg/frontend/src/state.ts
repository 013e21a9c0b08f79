/**
 * Per-task edit state: coarse label picks or fine candidate rankings.
 *
 * Edits persist to storage on every change under a per-annotator, per-task
 * key, so an accidental refresh restores exactly what was on screen.  The
 * coarse task starts with no verdicts (submit stays disabled until every
 * span has one); the fine task starts with the served candidate order,
 * which is already a complete ranking.
 */

import type { Task, Verdict } from './api.js';

interface StoredEdits {
  labels: Record<number, string>;
  rankings: Record<number, string[]>;
  suggestions: Record<number, string>;
}

function storageKey(annotator: string, taskId: number): string {
  return `nertc-edits:${annotator}:${taskId}`;
}

export class TaskEditState {
  private labels = new Map<number, string>();
  private rankings = new Map<number, string[]>();
  private suggestions = new Map<number, string>();

  constructor(
    readonly task: Task,
    readonly annotator: string,
    private storage: Storage | null = null,
  ) {
    if (task.kind === 'fine') {
      for (const span of task.spans) {
        this.rankings.set(span.span_index, [...span.candidates]);
      }
    }
    this.restore();
  }

  /** Valid choices for a span, verbatim from the task payload. */
  choicesFor(spanIndex: number): string[] {
    const span = this.task.spans.find((s) => s.span_index === spanIndex);
    if (!span) throw new Error(`no span ${spanIndex} in task ${this.task.task_id}`);
    return this.task.kind === 'coarse' ? (span.choices ?? []) : span.candidates;
  }

  label(spanIndex: number): string | undefined {
    return this.labels.get(spanIndex);
  }

  setLabel(spanIndex: number, label: string): void {
    if (!this.choicesFor(spanIndex).includes(label)) {
      throw new Error(`label ${label} is not offered for span ${spanIndex}`);
    }
    this.labels.set(spanIndex, label);
    this.persist();
  }

  ranking(spanIndex: number): string[] {
    return [...(this.rankings.get(spanIndex) ?? [])];
  }

  move(spanIndex: number, from: number, to: number): void {
    const ranking = this.rankings.get(spanIndex);
    if (!ranking || from < 0 || from >= ranking.length) return;
    const clamped = Math.max(0, Math.min(ranking.length - 1, to));
    const [item] = ranking.splice(from, 1);
    ranking.splice(clamped, 0, item as string);
    this.persist();
  }

  suggestion(spanIndex: number): string | undefined {
    return this.suggestions.get(spanIndex);
  }

  /** Replace the span's free-form suggestion (one per span; empty clears). */
  suggest(spanIndex: number, type: string): void {
    const ranking = this.rankings.get(spanIndex);
    if (!ranking) return;
    const previous = this.suggestions.get(spanIndex);
    if (previous) {
      const at = ranking.indexOf(previous);
      if (at >= 0) ranking.splice(at, 1);
      this.suggestions.delete(spanIndex);
    }
    const trimmed = type.trim();
    if (trimmed && !ranking.includes(trimmed)) {
      ranking.push(trimmed);
      this.suggestions.set(spanIndex, trimmed);
    }
    this.persist();
  }

  /** Coarse: every span labeled.  Fine: served order is already complete. */
  isComplete(): boolean {
    if (this.task.kind === 'coarse') {
      return this.task.spans.every((span) => this.labels.has(span.span_index));
    }
    return this.task.spans.every(
      (span) => (this.rankings.get(span.span_index) ?? []).length >= span.candidates.length,
    );
  }

  verdicts(): Verdict[] {
    return this.task.spans.map((span) => {
      if (this.task.kind === 'coarse') {
        return { span: span.span_index, label: this.labels.get(span.span_index) ?? '' };
      }
      return { span: span.span_index, ranking: this.ranking(span.span_index) };
    });
  }

  persist(): void {
    if (!this.storage) return;
    const stored: StoredEdits = {
      labels: Object.fromEntries(this.labels),
      rankings: Object.fromEntries(this.rankings),
      suggestions: Object.fromEntries(this.suggestions),
    };
    this.storage.setItem(storageKey(this.annotator, this.task.task_id), JSON.stringify(stored));
  }

  private restore(): void {
    if (!this.storage) return;
    const raw = this.storage.getItem(storageKey(this.annotator, this.task.task_id));
    if (!raw) return;
    try {
      const stored = JSON.parse(raw) as StoredEdits;
      for (const [span, label] of Object.entries(stored.labels ?? {})) {
        this.labels.set(Number(span), label);
      }
      for (const [span, ranking] of Object.entries(stored.rankings ?? {})) {
        this.rankings.set(Number(span), [...ranking]);
      }
      for (const [span, suggestion] of Object.entries(stored.suggestions ?? {})) {
        this.suggestions.set(Number(span), suggestion);
      }
    } catch {
      // stale or corrupt snapshot; start clean
    }
  }

  /** Drop the persisted snapshot after a successful submit. */
  clearPersisted(): void {
    this.storage?.removeItem(storageKey(this.annotator, this.task.task_id));
  }
}
