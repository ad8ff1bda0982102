import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { boot } from '../src/main.js';
import {
  FEATURES,
  interceptFetch,
  predictResponse,
  schemaResponse,
} from './helpers.js';

function setup(routes = {}) {
  document.body.innerHTML = '<div id="app"></div>';
  const { fetchFn, calls } = interceptFetch({
    '/api/schema': () => schemaResponse(),
    '/api/predict': (body: any) => predictResponse(body.features),
    ...routes,
  });
  const client = new ApiClient('', fetchFn);
  return { root: document.getElementById('app') as HTMLElement, client, calls };
}

describe('schema-driven form', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('renders all 11 fields with their units and bound hints', async () => {
    const { root, client } = setup();
    await boot(root, client);
    const rows = root.querySelectorAll('.field-row');
    expect(rows.length).toBe(11);
    for (const [name, key, unit, , min, max] of FEATURES) {
      const row = root.querySelector(`.field-row[data-key="${key}"]`)!;
      expect(row.querySelector('.field-name')!.textContent).toBe(name);
      expect(row.querySelector('.field-unit')!.textContent).toBe(unit);
      const input = row.querySelector<HTMLInputElement>('.field-input')!;
      expect(input.placeholder).toBe(`${min} .. ${max}`);
    }
  });

  it('starts at the bound midpoints with predict enabled', async () => {
    const { root, client } = setup();
    await boot(root, client);
    const input = root.querySelector<HTMLInputElement>(
      '.field-input[data-key="reaction_temp"]',
    )!;
    expect(input.value).toBe(String((300 + 900) / 2));
    expect(root.querySelector<HTMLButtonElement>('#predict-btn')!.disabled).toBe(false);
  });

  it('disables submission while any field is non-numeric', async () => {
    const { root, client } = setup();
    await boot(root, client);
    const input = root.querySelector<HTMLInputElement>(
      '.field-input[data-key="gas_flow"]',
    )!;
    input.value = 'warm';
    input.dispatchEvent(new Event('input'));
    const predict = root.querySelector<HTMLButtonElement>('#predict-btn')!;
    expect(predict.disabled).toBe(true);
    const badge = root.querySelector<HTMLElement>(
      '.field-row[data-key="gas_flow"] .invalid-badge',
    )!;
    expect(badge.hidden).toBe(false);
    input.value = '17.5';
    input.dispatchEvent(new Event('input'));
    expect(predict.disabled).toBe(false);
    expect(badge.hidden).toBe(true);
  });

  it('round-trips form -> request -> form values exactly', async () => {
    const { root, client, calls } = setup();
    await boot(root, client);
    const input = root.querySelector<HTMLInputElement>(
      '.field-input[data-key="pore_volume"]',
    )!;
    input.value = '0.30000000000000004';
    input.dispatchEvent(new Event('input'));
    root.querySelector<HTMLButtonElement>('#predict-btn')!.click();
    await new Promise((r) => setTimeout(r));
    const sent = calls.find((c) => c.path === '/api/predict')!.body as any;
    expect(sent.features.pore_volume).toBe(0.30000000000000004);
    expect(String(sent.features.pore_volume)).toBe(input.value);
  });
});
