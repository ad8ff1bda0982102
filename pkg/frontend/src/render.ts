/**
 * DOM builders.  Every number shown in a result panel is the String() of a
 * value taken from a service response; this module does no arithmetic on
 * displayed quantities (bar widths and scatter coordinates are layout
 * geometry, never rendered as text).
 */
import type {
  ColumnInfo,
  ExplainEntry,
  OptimizeResponse,
  ParetoSolution,
  PredictResponse,
} from './api.js';
import { FieldState, fieldNumber } from './state.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderForm(
  fields: FieldState[],
  onInput: (field: FieldState, text: string) => void,
): HTMLElement {
  const container = el('div', 'feature-form');
  for (const field of fields) {
    const row = el('label', 'field-row');
    row.dataset.key = field.info.key;
    const caption = el('span', 'field-name', field.info.name);
    const input = el('input', 'field-input');
    input.type = 'text';
    input.inputMode = 'decimal';
    input.value = field.text;
    input.placeholder = `${field.info.min} .. ${field.info.max}`;
    input.dataset.key = field.info.key;
    input.addEventListener('input', () => onInput(field, input.value));
    const unit = el('span', 'field-unit', field.info.unit);
    const badge = el('span', 'badge extrapolation-badge', 'outside training range');
    badge.hidden = !field.extrapolated;
    const invalid = el('span', 'badge invalid-badge', 'not a number');
    invalid.hidden = field.text.trim() === '' || fieldNumber(field) !== null;
    row.append(caption, input, unit, badge, invalid);
    container.append(row);
  }
  return container;
}

export function syncFormMarkers(container: HTMLElement, fields: FieldState[]): void {
  for (const field of fields) {
    const row = container.querySelector<HTMLElement>(
      `.field-row[data-key="${field.info.key}"]`,
    );
    if (!row) continue;
    const input = row.querySelector<HTMLInputElement>('.field-input');
    if (input && input.value !== field.text) input.value = field.text;
    const badge = row.querySelector<HTMLElement>('.extrapolation-badge');
    if (badge) badge.hidden = !field.extrapolated;
    const invalid = row.querySelector<HTMLElement>('.invalid-badge');
    if (invalid) invalid.hidden = field.text.trim() === '' || fieldNumber(field) !== null;
  }
}

export function renderPredictions(
  targets: ColumnInfo[],
  resp: PredictResponse,
): HTMLElement {
  const panel = el('div', 'prediction-panel');
  panel.append(el('h3', undefined, 'Predicted responses'));
  const list = el('dl', 'prediction-list');
  for (const t of targets) {
    const dt = el('dt', undefined, t.name);
    const dd = el('dd', 'prediction-value');
    dd.dataset.key = t.key;
    dd.textContent = `${String(resp.predictions[t.key])} ${t.unit}`;
    list.append(dt, dd);
  }
  panel.append(list);
  const flagged = Object.entries(resp.extrapolation)
    .filter(([, v]) => v)
    .map(([k]) => k);
  if (flagged.length > 0) {
    panel.append(
      el('p', 'extrapolation-note',
         `extrapolating on: ${flagged.join(', ')}`),
    );
  }
  panel.append(el('p', 'model-version', `model ${resp.model_version}`));
  return panel;
}

export function renderShap(entries: ExplainEntry[]): HTMLElement {
  const panel = el('div', 'shap-panel');
  panel.append(el('h3', undefined, 'Feature attributions'));
  for (const entry of entries) {
    const section = el('section', 'shap-target');
    section.dataset.target = entry.target;
    section.append(el('h4', undefined, entry.target));
    section.append(el('p', 'shap-base', `base value: ${String(entry.base_value)}`));
    const magnitudes = entry.order.map((k) => Math.abs(entry.values[k]));
    const peak = Math.max(...magnitudes, 0);
    if (peak === 0) {
      section.append(el('p', 'shap-empty', 'no feature influence: base only'));
    } else {
      const bars = el('div', 'shap-bars');
      for (const key of entry.order) {
        const value = entry.values[key];
        const bar = el('div', value >= 0 ? 'shap-bar positive' : 'shap-bar negative');
        bar.dataset.key = key;
        const fill = el('span', 'shap-fill');
        fill.style.width = `${(Math.abs(value) / peak) * 100}%`;
        bar.append(fill, el('span', 'shap-label', `${key}: ${String(value)}`));
        bars.append(bar);
      }
      section.append(bars);
    }
    if (entry.group_percent) {
      const parts = Object.entries(entry.group_percent).map(
        ([kind, pct]) => `${kind}: ${String(pct)}%`,
      );
      section.append(el('p', 'shap-groups', parts.join('  ')));
    }
    panel.append(section);
  }
  return panel;
}

export function renderPareto(
  resp: OptimizeResponse,
  xKey: string,
  yKey: string,
  onSelect: (solution: ParetoSolution) => void,
): HTMLElement {
  const panel = el('div', 'pareto-panel');
  if (resp.solutions.length === 0) {
    panel.append(el('p', 'pareto-empty', 'the archive came back empty; widen the bounds'));
    return panel;
  }
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', '0 0 320 240');
  svg.setAttribute('class', 'pareto-plot');
  const [xLo, xHi] = resp.objective_ranges[xKey];
  const [yLo, yHi] = resp.objective_ranges[yKey];
  const sx = (v: number) => (xHi > xLo ? 20 + ((v - xLo) / (xHi - xLo)) * 280 : 160);
  const sy = (v: number) => (yHi > yLo ? 220 - ((v - yLo) / (yHi - yLo)) * 200 : 120);
  resp.solutions.forEach((solution, index) => {
    const dot = document.createElementNS(SVG_NS, 'circle');
    dot.setAttribute('class', 'pareto-point');
    dot.setAttribute('data-index', String(index));
    dot.setAttribute('cx', String(sx(solution.objectives[xKey])));
    dot.setAttribute('cy', String(sy(solution.objectives[yKey])));
    dot.setAttribute('r', '4');
    const tip = document.createElementNS(SVG_NS, 'title');
    tip.textContent = `${xKey}: ${String(solution.objectives[xKey])}, `
      + `${yKey}: ${String(solution.objectives[yKey])}`;
    dot.append(tip);
    dot.addEventListener('click', () => onSelect(solution));
    svg.append(dot);
  });
  const xLabel = document.createElementNS(SVG_NS, 'text');
  xLabel.setAttribute('x', '160');
  xLabel.setAttribute('y', '236');
  xLabel.setAttribute('class', 'axis-label');
  xLabel.textContent = xKey;
  const yLabel = document.createElementNS(SVG_NS, 'text');
  yLabel.setAttribute('x', '8');
  yLabel.setAttribute('y', '12');
  yLabel.setAttribute('class', 'axis-label');
  yLabel.textContent = yKey;
  svg.append(xLabel, yLabel);
  panel.append(svg);
  panel.append(el('p', 'pareto-hint', 'click a point to load it into the form'));
  return panel;
}

export function renderError(message: string): HTMLElement {
  return el('p', 'error-message', message);
}
