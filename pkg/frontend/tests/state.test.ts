import { beforeEach, describe, expect, it } from 'vitest';

import type { Task } from '../src/api.js';
import { TaskEditState } from '../src/state.js';

const COARSE_CHOICES = ['PERSON', 'ORGANIZATION', 'LOCATION', 'MISC', 'O'];

function coarseTask(): Task {
  return {
    task_id: 1,
    kind: 'coarse',
    domain: 'film',
    tokens: ['Titanic', ',', 'James', 'Cameron', 'tarafından', 'yönetildi', '.'],
    tags: ['B-MISC', 'O', 'B-PERSON', 'I-PERSON', 'O', 'O', 'O'],
    spans: [
      { span_index: 0, start: 0, end: 1, surface: ['Titanic'], current: 'MISC', candidates: [], choices: COARSE_CHOICES },
      { span_index: 1, start: 2, end: 4, surface: ['James', 'Cameron'], current: 'PERSON', candidates: [], choices: COARSE_CHOICES },
    ],
  };
}

function fineTask(): Task {
  return {
    task_id: 7,
    kind: 'fine',
    domain: 'film',
    tokens: ['Titanic', 'battı'],
    tags: ['B-/film/film|/boat/ship', 'O'],
    spans: [
      { span_index: 0, start: 0, end: 1, surface: ['Titanic'], current: '/film/film', candidates: ['/film/film', '/boat/ship'] },
    ],
  };
}

describe('coarse edit state', () => {
  beforeEach(() => localStorage.clear());

  it('starts incomplete and completes when every span has a verdict', () => {
    const state = new TaskEditState(coarseTask(), 'ayse');
    expect(state.isComplete()).toBe(false);
    state.setLabel(0, 'MISC');
    expect(state.isComplete()).toBe(false);
    state.setLabel(1, 'PERSON');
    expect(state.isComplete()).toBe(true);
    expect(state.verdicts()).toEqual([
      { span: 0, label: 'MISC' },
      { span: 1, label: 'PERSON' },
    ]);
  });

  it('rejects labels that the payload does not offer', () => {
    const state = new TaskEditState(coarseTask(), 'ayse');
    expect(() => state.setLabel(0, 'PLACE')).toThrow(/not offered/);
  });

  it('persists edits and restores them for the same annotator and task', () => {
    const first = new TaskEditState(coarseTask(), 'ayse', localStorage);
    first.setLabel(0, 'LOCATION');
    const restored = new TaskEditState(coarseTask(), 'ayse', localStorage);
    expect(restored.label(0)).toBe('LOCATION');
    const other = new TaskEditState(coarseTask(), 'bora', localStorage);
    expect(other.label(0)).toBeUndefined();
  });

  it('clears the snapshot after submit', () => {
    const state = new TaskEditState(coarseTask(), 'ayse', localStorage);
    state.setLabel(0, 'MISC');
    state.clearPersisted();
    const restored = new TaskEditState(coarseTask(), 'ayse', localStorage);
    expect(restored.label(0)).toBeUndefined();
  });
});

describe('fine edit state', () => {
  beforeEach(() => localStorage.clear());

  it('initializes the ranking in served order and is already complete', () => {
    const state = new TaskEditState(fineTask(), 'ayse');
    expect(state.ranking(0)).toEqual(['/film/film', '/boat/ship']);
    expect(state.isComplete()).toBe(true);
  });

  it('reorders candidates', () => {
    const state = new TaskEditState(fineTask(), 'ayse');
    state.move(0, 1, 0);
    expect(state.ranking(0)).toEqual(['/boat/ship', '/film/film']);
    expect(state.verdicts()).toEqual([{ span: 0, ranking: ['/boat/ship', '/film/film'] }]);
  });

  it('clamps out-of-range moves', () => {
    const state = new TaskEditState(fineTask(), 'ayse');
    state.move(0, 0, 99);
    expect(state.ranking(0)).toEqual(['/boat/ship', '/film/film']);
    state.move(0, 5, 0);
    expect(state.ranking(0)).toEqual(['/boat/ship', '/film/film']);
  });

  it('keeps at most one free-form suggestion per span', () => {
    const state = new TaskEditState(fineTask(), 'ayse');
    state.suggest(0, '/transport/ship');
    expect(state.ranking(0)).toEqual(['/film/film', '/boat/ship', '/transport/ship']);
    state.suggest(0, '/event/disaster');
    expect(state.ranking(0)).toEqual(['/film/film', '/boat/ship', '/event/disaster']);
    state.suggest(0, '');
    expect(state.ranking(0)).toEqual(['/film/film', '/boat/ship']);
  });

  it('restores a reordered ranking from storage', () => {
    const first = new TaskEditState(fineTask(), 'ayse', localStorage);
    first.move(0, 1, 0);
    const restored = new TaskEditState(fineTask(), 'ayse', localStorage);
    expect(restored.ranking(0)).toEqual(['/boat/ship', '/film/film']);
  });
});
