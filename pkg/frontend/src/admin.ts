/**
 * Minimal admin panel: provision users, upload a dataset archive, create
 * and open studies, download exports, and view the agreement report.
 */

import { ApiClient, ApiError } from './api.js';
import type { Direction } from './types.js';

export class AdminPanel {
  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly token: string,
  ) {}

  render(): void {
    this.root.innerHTML = `
      <h2>Administration</h2>
      <section>
        <h3>New participant</h3>
        <input id="adm-user-id" placeholder="user id">
        <input id="adm-user-name" placeholder="display name">
        <input id="adm-user-pw" placeholder="password" type="password">
        <button id="adm-user-create">Create user</button>
      </section>
      <section>
        <h3>Upload dataset</h3>
        <input id="adm-ds-name" placeholder="dataset name">
        <input id="adm-ds-file" type="file" accept=".zip,.tar,.tar.gz,.tgz">
        <label>ground truth (optional): <input id="adm-ds-manifest" type="file" accept=".csv"></label>
        <button id="adm-ds-upload">Upload</button>
      </section>
      <section>
        <h3>New study</h3>
        <input id="adm-study-id" placeholder="study id">
        <input id="adm-study-dataset" placeholder="dataset id">
        <input id="adm-study-participants" placeholder="participants (comma separated)">
        <label><input id="adm-study-training" type="checkbox"> training mode</label>
        <div id="adm-mapping">
          <label>left <input id="adm-map-left" value="normal"></label>
          <label>right <input id="adm-map-right" value="atypical"></label>
          <label>up <input id="adm-map-up" value="(postpone)"></label>
          <label>down <input id="adm-map-down" value=""></label>
        </div>
        <button id="adm-study-create">Create + open</button>
      </section>
      <section>
        <h3>Results</h3>
        <input id="adm-result-study" placeholder="study id">
        <button id="adm-export">Download CSV</button>
        <button id="adm-report">Show report</button>
        <pre id="adm-output"></pre>
      </section>
    `;
    this.bind();
  }

  private element<T extends HTMLElement>(id: string): T {
    return this.root.querySelector(`#${id}`) as T;
  }

  private output(text: string): void {
    this.element<HTMLPreElement>('adm-output').textContent = text;
  }

  private async guarded(action: () => Promise<void>): Promise<void> {
    try {
      await action();
    } catch (error) {
      if (error instanceof ApiError) {
        this.output(`error: ${error.code}: ${error.message}`);
      } else {
        this.output(`error: ${String(error)}`);
      }
    }
  }

  /** Mapping document from the four direction inputs. */
  mappingFromInputs(values: Partial<Record<Direction, string>>): Record<string, unknown> {
    const mapping: Record<string, unknown> = {};
    for (const direction of ['left', 'right', 'up', 'down'] as Direction[]) {
      const raw = (values[direction] ?? '').trim();
      if (!raw) continue;
      mapping[direction] = raw === '(postpone)'
        ? { action: 'postpone' }
        : { action: 'label', class_name: raw };
    }
    return mapping;
  }

  private bind(): void {
    this.element<HTMLButtonElement>('adm-user-create').onclick = () =>
      this.guarded(async () => {
        const created = await this.api.createUser(
          this.element<HTMLInputElement>('adm-user-id').value.trim(),
          this.element<HTMLInputElement>('adm-user-pw').value,
          'participant',
          this.element<HTMLInputElement>('adm-user-name').value.trim(),
        );
        this.output(`created user ${created.user_id}`);
      });

    this.element<HTMLButtonElement>('adm-ds-upload').onclick = () =>
      this.guarded(async () => {
        const file = this.element<HTMLInputElement>('adm-ds-file').files?.[0];
        if (!file) {
          this.output('choose an archive first');
          return;
        }
        const manifest = this.element<HTMLInputElement>('adm-ds-manifest').files?.[0];
        const name = this.element<HTMLInputElement>('adm-ds-name').value.trim()
          || file.name;
        const result = await this.api.uploadDataset(file, name, manifest);
        const warnings = result.warnings.length
          ? `\nwarnings:\n${result.warnings.join('\n')}` : '';
        this.output(
          `dataset ${result.dataset_id}: ${result.patch_count} patches${warnings}`);
      });

    this.element<HTMLButtonElement>('adm-study-create').onclick = () =>
      this.guarded(async () => {
        const studyId = this.element<HTMLInputElement>('adm-study-id').value.trim();
        const mapping = this.mappingFromInputs({
          left: this.element<HTMLInputElement>('adm-map-left').value,
          right: this.element<HTMLInputElement>('adm-map-right').value,
          up: this.element<HTMLInputElement>('adm-map-up').value,
          down: this.element<HTMLInputElement>('adm-map-down').value,
        });
        await this.api.createStudy({
          study_id: studyId,
          dataset_id: this.element<HTMLInputElement>('adm-study-dataset').value.trim(),
          mode: this.element<HTMLInputElement>('adm-study-training').checked
            ? 'training' : 'annotation',
          mapping,
          participants: this.element<HTMLInputElement>('adm-study-participants')
            .value.split(',').map((p) => p.trim()).filter(Boolean),
        });
        await this.api.openStudy(studyId);
        this.output(`study ${studyId} created and opened`);
      });

    this.element<HTMLButtonElement>('adm-export').onclick = () =>
      this.guarded(async () => {
        const studyId = this.element<HTMLInputElement>('adm-result-study').value.trim();
        const url = this.api.exportUrl(studyId, false);
        const response = await fetch(url, {
          headers: { Authorization: `Bearer ${this.token}` },
        });
        if (!response.ok) {
          this.output(`export failed: HTTP ${response.status}`);
          return;
        }
        const blob = await response.blob();
        const link = document.createElement('a');
        link.href = URL.createObjectURL(blob);
        link.download = `${studyId}.csv`;
        link.click();
        this.output(`downloaded ${studyId}.csv`);
      });

    this.element<HTMLButtonElement>('adm-report').onclick = () =>
      this.guarded(async () => {
        const studyId = this.element<HTMLInputElement>('adm-result-study').value.trim();
        const report = await this.api.reportJson(studyId);
        this.output(JSON.stringify(report, null, 2));
      });
  }
}
