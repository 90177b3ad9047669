/** Thin typed client for the annotation service API. */

import type {
  AnnotationPayload,
  LoginResponse,
  NextItemResponse,
  Progress,
  StudyInfo,
  SubmitResponse,
  UndoResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private token = '';

  constructor(
    private readonly baseUrl = '',
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    let payload: BodyInit | undefined;
    if (body instanceof FormData) {
      payload = body;
    } else if (body !== undefined) {
      headers['Content-Type'] = 'application/json';
      payload = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: payload,
    });
    if (!response.ok) {
      let code = 'error';
      let message = `HTTP ${response.status}`;
      try {
        const doc = await response.json();
        code = doc.code ?? code;
        message = doc.message ?? message;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message);
    }
    const text = await response.text();
    return (text ? JSON.parse(text) : undefined) as T;
  }

  login(userId: string, password: string): Promise<LoginResponse> {
    return this.request('POST', '/api/auth/login', {
      user_id: userId,
      password,
    });
  }

  listStudies(): Promise<{ studies: StudyInfo[] }> {
    return this.request('GET', '/api/studies');
  }

  nextItem(studyId: string): Promise<NextItemResponse> {
    return this.request('GET', `/api/studies/${studyId}/next`);
  }

  submit(studyId: string, payload: AnnotationPayload): Promise<SubmitResponse> {
    return this.request('POST', `/api/studies/${studyId}/annotations`, payload);
  }

  undo(studyId: string): Promise<UndoResponse> {
    return this.request('POST', `/api/studies/${studyId}/undo`);
  }

  progress(studyId: string): Promise<{ progress: Progress; first_visit: boolean }> {
    return this.request('GET', `/api/studies/${studyId}/progress`);
  }

  // admin surface, used by the panel in admin.ts
  createUser(userId: string, password: string, role: string, displayName: string) {
    return this.request<{ user_id: string }>('POST', '/api/admin/users', {
      user_id: userId,
      password,
      role,
      display_name: displayName,
    });
  }

  createGroup(groupId: string, name: string, members: string[]) {
    return this.request<{ group_id: string }>('POST', '/api/admin/groups', {
      group_id: groupId,
      name,
      members,
    });
  }

  uploadDataset(file: File, name: string, manifest?: File) {
    const form = new FormData();
    form.append('file', file);
    form.append('name', name);
    if (manifest) form.append('manifest', manifest);
    return this.request<{ dataset_id: string; patch_count: number; warnings: string[] }>(
      'POST', '/api/admin/datasets', form);
  }

  createStudy(body: unknown) {
    return this.request<{ study_id: string }>('POST', '/api/admin/studies', body);
  }

  openStudy(studyId: string) {
    return this.request<{ status: string }>('POST', `/api/admin/studies/${studyId}/open`);
  }

  closeStudy(studyId: string) {
    return this.request<{ status: string }>('POST', `/api/admin/studies/${studyId}/close`);
  }

  reportJson(studyId: string): Promise<unknown> {
    return this.request('GET', `/api/admin/studies/${studyId}/report`);
  }

  exportUrl(studyId: string, includeHistory: boolean): string {
    const suffix = includeHistory ? '?include_history=true' : '';
    return `${this.baseUrl}/api/admin/studies/${studyId}/export.csv${suffix}`;
  }
}
