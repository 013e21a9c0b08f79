/**
 * DOM rendering for the review screen.  No framework: every screen is a
 * plain render function over a root element, and all interactive elements
 * carry data- attributes so tests can drive them.
 */

import type { Progress, Task } from './api.js';
import type { TaskEditState } from './state.js';

export interface ViewHandlers {
  onLabel(spanIndex: number, label: string): void;
  onMove(spanIndex: number, from: number, to: number): void;
  onSuggest(spanIndex: number, type: string): void;
  onSubmit(): void;
  onRetry(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderSentence(task: Task): HTMLElement {
  const sentence = el('p', { class: 'sentence' });
  const spanAt = new Map<number, { end: number; current: string }>();
  for (const span of task.spans) spanAt.set(span.start, { end: span.end, current: span.current });
  let i = 0;
  while (i < task.tokens.length) {
    const span = spanAt.get(i);
    if (span) {
      const mark = el('mark', { class: 'span', 'data-span-start': String(i) });
      mark.textContent = task.tokens.slice(i, span.end).join(' ');
      mark.appendChild(el('sup', { class: 'current-type' }, span.current));
      sentence.appendChild(mark);
      i = span.end;
    } else {
      sentence.appendChild(document.createTextNode(task.tokens[i] ?? ''));
      i += 1;
    }
    if (i < task.tokens.length) sentence.appendChild(document.createTextNode(' '));
  }
  return sentence;
}

function renderCoarseControls(
  state: TaskEditState,
  spanIndex: number,
  handlers: ViewHandlers,
): HTMLElement {
  const group = el('div', { class: 'choices', role: 'radiogroup' });
  state.choicesFor(spanIndex).forEach((choice, position) => {
    const button = el(
      'button',
      {
        type: 'button',
        class: 'choice',
        'data-span': String(spanIndex),
        'data-label': choice,
        'data-key': String(position + 1),
        'aria-pressed': state.label(spanIndex) === choice ? 'true' : 'false',
      },
      `${position + 1} ${choice}`,
    );
    button.addEventListener('click', () => handlers.onLabel(spanIndex, choice));
    group.appendChild(button);
  });
  return group;
}

function renderFineControls(
  state: TaskEditState,
  spanIndex: number,
  handlers: ViewHandlers,
): HTMLElement {
  const wrap = el('div', { class: 'ranking' });
  const list = el('ol', { class: 'candidates', 'data-span': String(spanIndex) });
  state.ranking(spanIndex).forEach((type, position) => {
    const item = el('li', { 'data-type': type });
    item.appendChild(el('span', { class: 'type' }, type));
    const up = el('button', { type: 'button', class: 'up', 'data-span': String(spanIndex), 'data-pos': String(position) }, '▲');
    const down = el('button', { type: 'button', class: 'down', 'data-span': String(spanIndex), 'data-pos': String(position) }, '▼');
    up.addEventListener('click', () => handlers.onMove(spanIndex, position, position - 1));
    down.addEventListener('click', () => handlers.onMove(spanIndex, position, position + 1));
    item.append(up, down);
    list.appendChild(item);
  });
  wrap.appendChild(list);

  const suggestion = el('input', {
    type: 'text',
    class: 'suggestion',
    placeholder: 'farklı bir tür öner…',
    'data-span': String(spanIndex),
    value: state.suggestion(spanIndex) ?? '',
  });
  suggestion.addEventListener('change', () =>
    handlers.onSuggest(spanIndex, (suggestion as HTMLInputElement).value),
  );
  wrap.appendChild(suggestion);
  return wrap;
}

export function renderTask(root: HTMLElement, state: TaskEditState, handlers: ViewHandlers): void {
  const task = state.task;
  root.replaceChildren();
  const header = el('header');
  header.appendChild(el('h2', {}, `Cümle ${task.task_id}`));
  header.appendChild(el('span', { class: 'domain' }, `alan: ${task.domain}`));
  root.appendChild(header);
  root.appendChild(renderSentence(task));

  for (const span of task.spans) {
    const section = el('section', { class: 'span-editor', 'data-span': String(span.span_index) });
    section.appendChild(el('h3', {}, span.surface.join(' ')));
    section.appendChild(
      task.kind === 'coarse'
        ? renderCoarseControls(state, span.span_index, handlers)
        : renderFineControls(state, span.span_index, handlers),
    );
    root.appendChild(section);
  }

  const error = el('p', { class: 'error', role: 'alert', hidden: '' });
  root.appendChild(error);

  const submit = el('button', { type: 'button', class: 'submit' }, 'Gönder');
  (submit as HTMLButtonElement).disabled = !state.isComplete();
  submit.addEventListener('click', () => handlers.onSubmit());
  root.appendChild(submit);
}

/** Refresh enabled/pressed states without rebuilding the whole screen. */
export function refreshControls(root: HTMLElement, state: TaskEditState): void {
  for (const button of root.querySelectorAll<HTMLButtonElement>('button.choice')) {
    const spanIndex = Number(button.dataset.span);
    const pressed = state.label(spanIndex) === button.dataset.label;
    button.setAttribute('aria-pressed', pressed ? 'true' : 'false');
  }
  const submit = root.querySelector<HTMLButtonElement>('button.submit');
  if (submit) submit.disabled = !state.isComplete();
}

export function showError(root: HTMLElement, message: string): void {
  const error = root.querySelector<HTMLElement>('.error');
  if (!error) return;
  error.textContent = message;
  error.removeAttribute('hidden');
}

export function renderCompletion(root: HTMLElement, progress: Progress): void {
  root.replaceChildren();
  root.appendChild(el('h2', { class: 'done' }, 'Bitti!'));
  const judged = Object.entries(progress.judged)
    .map(([annotator, count]) => `${annotator}: ${count}`)
    .join(', ');
  root.appendChild(
    el('p', { class: 'progress' }, `${progress.tasks} görev, yargılar: ${judged || 'yok'}`),
  );
}

export function renderRetry(root: HTMLElement, message: string, handlers: ViewHandlers): void {
  root.replaceChildren();
  const banner = el('div', { class: 'retry-banner', role: 'alert' });
  banner.appendChild(el('p', {}, `Sunucuya ulaşılamadı: ${message}`));
  const retry = el('button', { type: 'button', class: 'retry' }, 'Tekrar dene');
  retry.addEventListener('click', () => handlers.onRetry());
  banner.appendChild(retry);
  root.appendChild(banner);
}
