/** Shared types mirroring the service's JSON wire format. */

export type Direction = 'left' | 'right' | 'up' | 'down';

export const DIRECTIONS: readonly Direction[] = ['left', 'right', 'up', 'down'];

export type InputModality = 'touch' | 'mouse' | 'keyboard';

export type DeviceType = 'mobile' | 'tablet' | 'desktop' | 'unknown';

export interface MappingEntry {
  action: 'label' | 'postpone' | 'unassigned';
  class_name?: string;
}

export type DirectionMapping = Partial<Record<Direction, MappingEntry>>;

export interface DisplayOptions {
  scale_percent: number;
  interpolation_enabled: boolean;
}

export interface Progress {
  total: number;
  labeled: number;
  postpone_remaining: number;
  completed: boolean;
}

export interface StudyInfo {
  study_id: string;
  dataset_id: string;
  mode: 'annotation' | 'training';
  status: string;
  mapping: DirectionMapping;
  display: DisplayOptions;
  progress: Progress;
  first_visit: boolean;
}

export interface PatchInfo {
  patch_id: string;
  filename: string;
  width: number;
  height: number;
  image_url: string;
}

export interface NextItemResponse {
  done: boolean;
  patch?: PatchInfo;
  presentation_index?: number;
  progress: Progress;
}

export interface Reveal {
  true_label: string;
  was_correct: boolean;
}

export interface SubmitResponse {
  patch_id: string;
  action: 'label' | 'postpone';
  class_label: string | null;
  postpone_count: number;
  progress: Progress;
  reveal?: Reveal;
}

export interface UndoResponse {
  restored_patch_id: string;
  progress: Progress;
}

export interface LoginResponse {
  token: string;
  user_id: string;
  display_name: string;
  role: 'admin' | 'participant';
}

export interface AnnotationPayload {
  direction?: Direction;
  postpone?: boolean;
  client_duration_ms: number;
  device_type: DeviceType;
}
