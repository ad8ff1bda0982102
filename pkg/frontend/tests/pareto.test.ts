import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { boot } from '../src/main.js';
import {
  FEATURE_KEYS,
  interceptFetch,
  optimizeResponse,
  predictResponse,
  schemaResponse,
} from './helpers.js';

const flush = () => new Promise((r) => setTimeout(r));

function setup(optimize: (body: unknown) => unknown = () => optimizeResponse()) {
  document.body.innerHTML = '<div id="app"></div>';
  const { fetchFn, calls } = interceptFetch({
    '/api/schema': () => schemaResponse(),
    '/api/predict': (body: any) => predictResponse(body.features),
    '/api/optimize': optimize,
  });
  return {
    root: document.getElementById('app') as HTMLElement,
    client: new ApiClient('', fetchFn),
    calls,
  };
}

describe('pareto flow', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('renders one point per solution', async () => {
    const { root, client } = setup();
    await boot(root, client);
    root.querySelector<HTMLButtonElement>('#pareto-btn')!.click();
    await flush();
    expect(root.querySelectorAll('.pareto-point').length).toBe(3);
  });

  it('clicking a point loads all 11 decision values into the form exactly', async () => {
    const { root, client } = setup();
    await boot(root, client);
    root.querySelector<HTMLButtonElement>('#pareto-btn')!.click();
    await flush();
    const resp = optimizeResponse();
    const second = root.querySelector<SVGCircleElement>(
      '.pareto-point[data-index="1"]',
    )!;
    second.dispatchEvent(new Event('click'));
    for (const key of FEATURE_KEYS) {
      const input = root.querySelector<HTMLInputElement>(
        `.field-input[data-key="${key}"]`,
      )!;
      expect(input.value).toBe(String(resp.solutions[1].decision[key]));
      expect(Number(input.value)).toBe(resp.solutions[1].decision[key]);
    }
  });

  it('axis selection toggles without refetching', async () => {
    const { root, client, calls } = setup();
    await boot(root, client);
    root.querySelector<HTMLButtonElement>('#pareto-btn')!.click();
    await flush();
    const before = calls.filter((c) => c.path === '/api/optimize').length;
    const ySelect = root.querySelector<HTMLSelectElement>('#axis-y')!;
    ySelect.value = 'ch4';
    ySelect.dispatchEvent(new Event('change'));
    await flush();
    expect(root.querySelectorAll('.pareto-point').length).toBe(3);
    expect(calls.filter((c) => c.path === '/api/optimize').length).toBe(before);
  });

  it('renders an explicit empty state for an empty archive', async () => {
    const { root, client } = setup(() => ({
      solutions: [],
      decision_ranges: {},
      objective_ranges: {},
      model_version: 'v1:test',
    }));
    await boot(root, client);
    root.querySelector<HTMLButtonElement>('#pareto-btn')!.click();
    await flush();
    expect(root.querySelector('.pareto-empty')).not.toBeNull();
    expect(root.querySelectorAll('.pareto-point').length).toBe(0);
  });

  it('shows budget guidance when the service replies 422', async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const { fetchFn } = interceptFetch({
      '/api/schema': () => schemaResponse(),
      '/api/optimize': () => new Error('over the service budget; reduce iterations'),
    });
    const root = document.getElementById('app') as HTMLElement;
    await boot(root, new ApiClient('', fetchFn));
    root.querySelector<HTMLButtonElement>('#pareto-btn')!.click();
    await flush();
    expect(root.querySelector('#pareto .error-message')!.textContent)
      .toContain('budget');
  });
});
