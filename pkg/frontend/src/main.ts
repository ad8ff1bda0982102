/**
 * Boot: fetch the schema, build the form, and wire the predict / explain /
 * optimize flows.  One in-flight request per flow; stale responses are
 * discarded through sequence numbers.
 */
import { ApiClient, OptimizeResponse, SchemaResponse } from './api.js';
import {
  FieldState,
  FlowGate,
  applyExtrapolationFlags,
  buildForm,
  formValid,
  formValues,
  loadDecision,
  midpoints,
} from './state.js';
import {
  renderError,
  renderForm,
  renderPareto,
  renderPredictions,
  renderShap,
  syncFormMarkers,
} from './render.js';

export interface AppHandles {
  root: HTMLElement;
  client: ApiClient;
  schema: SchemaResponse;
  fields: FieldState[];
  lastPareto: OptimizeResponse | null;
}

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get('api') ?? '';
}

export async function boot(root: HTMLElement, client?: ApiClient): Promise<AppHandles> {
  const api = client ?? new ApiClient(apiBase());
  const schema = await api.schema();
  const fields = buildForm(schema);
  midpoints(fields);

  const app: AppHandles = { root, client: api, schema, fields, lastPareto: null };
  const gates = { predict: new FlowGate(), explain: new FlowGate(), pareto: new FlowGate() };

  root.innerHTML = '';
  const formHost = document.createElement('div');
  formHost.id = 'form-host';
  const actions = document.createElement('div');
  actions.id = 'actions';
  const predictBtn = document.createElement('button');
  predictBtn.id = 'predict-btn';
  predictBtn.textContent = 'Predict';
  const explainBtn = document.createElement('button');
  explainBtn.id = 'explain-btn';
  explainBtn.textContent = 'Explain';
  explainBtn.disabled = true; // needs a prediction first
  const paretoBtn = document.createElement('button');
  paretoBtn.id = 'pareto-btn';
  paretoBtn.textContent = 'Find optima';
  actions.append(predictBtn, explainBtn, paretoBtn);

  const status = document.createElement('div');
  status.id = 'status';
  const results = document.createElement('div');
  results.id = 'results';
  const shapHost = document.createElement('div');
  shapHost.id = 'shap';
  const paretoHost = document.createElement('div');
  paretoHost.id = 'pareto';
  const axisBar = document.createElement('div');
  axisBar.id = 'axis-bar';
  const xSelect = document.createElement('select');
  xSelect.id = 'axis-x';
  const ySelect = document.createElement('select');
  ySelect.id = 'axis-y';
  for (const t of schema.targets) {
    for (const select of [xSelect, ySelect]) {
      const option = document.createElement('option');
      option.value = t.key;
      option.textContent = t.name;
      select.append(option);
    }
  }
  xSelect.value = schema.targets[0].key;
  ySelect.value = schema.targets[1].key;
  axisBar.append(xSelect, ySelect);

  root.append(formHost, actions, status, results, shapHost, axisBar, paretoHost);

  const refreshButtons = () => {
    const valid = formValid(fields);
    predictBtn.disabled = !valid;
    explainBtn.disabled = !valid || results.childElementCount === 0;
  };

  const formEl = renderForm(fields, (field, text) => {
    field.text = text;
    syncFormMarkers(formEl, fields);
    refreshButtons();
  });
  formHost.append(formEl);
  refreshButtons();

  const showError = (target: HTMLElement, err: unknown) => {
    target.innerHTML = '';
    target.append(renderError(err instanceof Error ? err.message : String(err)));
  };

  const runPredict = async () => {
    const ticket = gates.predict.next();
    status.textContent = 'predicting…';
    try {
      const resp = await api.predict(formValues(fields));
      if (!gates.predict.isCurrent(ticket)) return;
      applyExtrapolationFlags(fields, resp.extrapolation);
      syncFormMarkers(formEl, fields);
      results.innerHTML = '';
      results.append(renderPredictions(schema.targets, resp));
      status.textContent = '';
      refreshButtons();
    } catch (err) {
      if (!gates.predict.isCurrent(ticket)) return;
      status.textContent = '';
      showError(results, err); // form state is untouched on failure
      refreshButtons();
    }
  };

  const runExplain = async () => {
    const ticket = gates.explain.next();
    status.textContent = 'explaining…';
    try {
      const resp = await api.explain(formValues(fields));
      if (!gates.explain.isCurrent(ticket)) return;
      shapHost.innerHTML = '';
      shapHost.append(renderShap(resp.explanations));
      status.textContent = '';
    } catch (err) {
      if (!gates.explain.isCurrent(ticket)) return;
      status.textContent = '';
      showError(shapHost, err);
    }
  };

  const drawPareto = () => {
    if (!app.lastPareto) return;
    paretoHost.innerHTML = '';
    paretoHost.append(
      renderPareto(app.lastPareto, xSelect.value, ySelect.value, (solution) => {
        loadDecision(fields, solution.decision);
        syncFormMarkers(formEl, fields);
        refreshButtons();
      }),
    );
  };

  const runPareto = async () => {
    const ticket = gates.pareto.next();
    status.textContent = 'searching…';
    try {
      const resp = await api.optimize({ seed: 0 });
      if (!gates.pareto.isCurrent(ticket)) return;
      app.lastPareto = resp;
      status.textContent = '';
      drawPareto();
    } catch (err) {
      if (!gates.pareto.isCurrent(ticket)) return;
      status.textContent = '';
      showError(paretoHost, err);
    }
  };

  predictBtn.addEventListener('click', runPredict);
  explainBtn.addEventListener('click', runExplain);
  paretoBtn.addEventListener('click', runPareto);
  xSelect.addEventListener('change', drawPareto); // redraw only, no refetch
  ySelect.addEventListener('change', drawPareto);

  return app;
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot(document.getElementById('app') as HTMLElement).catch((err) => {
    const host = document.getElementById('app');
    if (host) {
      host.textContent = `failed to reach the prediction service: ${err}`;
    }
  });
}
