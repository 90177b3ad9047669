/**
 * DOM rendering for the card deck. Display settings are applied purely
 * through CSS: scale_percent sizes the card against the viewport's smaller
 * dimension, and the interpolation toggle switches between pixelated
 * (nearest-neighbor) and smooth image scaling. Neither ever touches the
 * annotation payload.
 */

import type { DisplayOptions, PatchInfo, Progress } from './types.js';

export function applyDisplayOptions(image: HTMLElement, options: DisplayOptions): void {
  const fraction = Math.min(100, Math.max(10, options.scale_percent));
  image.style.width = `${fraction}vmin`;
  image.style.height = `${fraction}vmin`;
  image.style.imageRendering = options.interpolation_enabled ? 'auto' : 'pixelated';
}

export function renderCardImage(
  card: HTMLElement,
  patch: PatchInfo,
  options: DisplayOptions,
  authToken: string,
): HTMLImageElement {
  card.innerHTML = '';
  const image = document.createElement('img');
  image.alt = patch.filename;
  image.draggable = false;
  // the image endpoint needs the bearer token, so fetch it into a blob URL
  void loadAuthorizedImage(image, patch.image_url, authToken);
  applyDisplayOptions(image, options);
  card.appendChild(image);
  return image;
}

async function loadAuthorizedImage(
  image: HTMLImageElement, url: string, token: string): Promise<void> {
  try {
    const response = await fetch(url, {
      headers: { Authorization: `Bearer ${token}` },
    });
    if (!response.ok) return;
    const blob = await response.blob();
    image.src = URL.createObjectURL(blob);
  } catch {
    /* image stays blank on network failure; the card itself retries */
  }
}

export function renderProgress(bar: HTMLElement, progress: Progress): void {
  bar.textContent =
    `${progress.labeled} / ${progress.total}` +
    (progress.postpone_remaining > 0
      ? ` (+${progress.postpone_remaining} postponed)` : '');
  bar.setAttribute('data-completed', String(progress.completed));
}

export function setCardOffset(card: HTMLElement, dx: number, dy: number): void {
  const rotation = dx / 20;
  card.style.transform = `translate(${dx}px, ${dy}px) rotate(${rotation}deg)`;
}

export function resetCardOffset(card: HTMLElement): void {
  card.style.transform = '';
}
