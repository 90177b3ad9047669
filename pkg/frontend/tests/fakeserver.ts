/**
 * In-memory stand-in for the annotation service, mimicking the wire
 * behavior the deck depends on: next/submit/undo/progress semantics with a
 * primary deck, postpone queue, and undo re-presentation.
 */

import { ApiError } from '../src/api.js';
import type {
  AnnotationPayload,
  NextItemResponse,
  PatchInfo,
  Progress,
  StudyInfo,
  SubmitResponse,
  UndoResponse,
} from '../src/types.js';

interface Decision {
  patchIndex: number;
  label: string | null; // null = postpone
  undone: boolean;
  payload: AnnotationPayload;
}

export class FakeServer {
  decisions: Decision[] = [];
  submitCalls: AnnotationPayload[] = [];
  failNextSubmits = 0; // simulate network failure (HTTP 503) n times

  private cursor = 0;
  private queue: number[] = [];
  private restore: number[] = [];
  private outstanding: number | null = null;
  private terminal = new Map<number, number>();

  constructor(readonly study: StudyInfo, readonly patches: PatchInfo[],
              private readonly truth: string[] | null = null) {}

  progress(): Progress {
    return {
      total: this.patches.length,
      labeled: this.terminal.size,
      postpone_remaining: this.queue.length,
      completed: this.terminal.size === this.patches.length,
    };
  }

  next(): NextItemResponse {
    if (this.outstanding === null) {
      if (this.restore.length) {
        this.outstanding = this.restore[this.restore.length - 1];
      } else if (this.cursor < this.patches.length) {
        this.outstanding = this.cursor;
      } else if (this.queue.length) {
        this.outstanding = this.queue[0];
      }
    }
    if (this.outstanding === null) {
      return { done: true, progress: this.progress() };
    }
    return {
      done: false,
      patch: this.patches[this.outstanding],
      presentation_index: this.decisions.length,
      progress: this.progress(),
    };
  }

  submit(payload: AnnotationPayload): SubmitResponse {
    this.submitCalls.push(payload);
    if (this.failNextSubmits > 0) {
      this.failNextSubmits -= 1;
      throw new ApiError(503, 'unavailable', 'service unavailable');
    }
    if (this.outstanding === null) {
      throw new ApiError(409, 'no_outstanding_presentation',
        'no presentation awaiting a decision');
    }
    const patchIndex = this.outstanding;
    const postpone = payload.postpone === true;
    let label: string | null = null;
    if (!postpone) {
      const entry = this.study.mapping[payload.direction!];
      if (!entry || entry.action === 'unassigned') {
        throw new ApiError(422, 'unassigned_direction', 'direction not assigned');
      }
      label = entry.action === 'label' ? entry.class_name! : null;
    }

    if (this.restore.length && this.restore[this.restore.length - 1] === patchIndex) {
      this.restore.pop();
    } else if (this.cursor < this.patches.length && patchIndex === this.cursor) {
      this.cursor += 1;
    } else if (this.queue[0] === patchIndex) {
      this.queue.shift();
    }

    if (label === null && !postpone) {
      // direction mapped to postpone
      this.queue.push(patchIndex);
    } else if (postpone) {
      this.queue.push(patchIndex);
    } else {
      this.terminal.set(patchIndex, this.decisions.length);
    }
    this.decisions.push({ patchIndex, label, undone: false, payload });
    this.outstanding = null;

    const response: SubmitResponse = {
      patch_id: this.patches[patchIndex].patch_id,
      action: label !== null ? 'label' : 'postpone',
      class_label: label,
      postpone_count: 0,
      progress: this.progress(),
    };
    if (this.study.mode === 'training' && label !== null && this.truth) {
      response.reveal = {
        true_label: this.truth[patchIndex],
        was_correct: this.truth[patchIndex] === label,
      };
    }
    return response;
  }

  undo(): UndoResponse {
    const target = [...this.decisions].reverse().find((d) => !d.undone);
    if (!target) {
      throw new ApiError(409, 'nothing_to_undo', 'no decision to undo');
    }
    target.undone = true;
    if (target.label !== null) {
      this.terminal.delete(target.patchIndex);
    } else {
      this.queue = this.queue.filter((p) => p !== target.patchIndex);
    }
    this.restore = this.restore.filter((p) => p !== target.patchIndex);
    this.restore.push(target.patchIndex);
    this.outstanding = null;
    return {
      restored_patch_id: this.patches[target.patchIndex].patch_id,
      progress: this.progress(),
    };
  }
}

export function makeStudy(overrides: Partial<StudyInfo> = {}): StudyInfo {
  return {
    study_id: 's1',
    dataset_id: 'd1',
    mode: 'annotation',
    status: 'open',
    mapping: {
      left: { action: 'label', class_name: 'normal' },
      right: { action: 'label', class_name: 'atypical' },
      up: { action: 'postpone' },
    },
    display: { scale_percent: 100, interpolation_enabled: false },
    progress: { total: 3, labeled: 0, postpone_remaining: 0, completed: false },
    first_visit: true,
    ...overrides,
  };
}

export function makePatches(count: number): PatchInfo[] {
  return Array.from({ length: count }, (_, i) => ({
    patch_id: `patch-${i}`,
    filename: `patch_${i}.png`,
    width: 128,
    height: 128,
    image_url: `/api/studies/s1/image/patch-${i}`,
  }));
}

/** ApiClient-compatible facade over the fake server. */
export function fakeApi(server: FakeServer) {
  return {
    nextItem: async () => server.next(),
    submit: async (_studyId: string, payload: AnnotationPayload) =>
      server.submit(payload),
    undo: async () => server.undo(),
    progress: async () => ({ progress: server.progress(), first_visit: false }),
  };
}
