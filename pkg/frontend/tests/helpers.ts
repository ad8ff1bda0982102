/** Canned service responses and an interception fetch for the flow tests. */
import type {
  ExplainResponse,
  OptimizeResponse,
  PredictResponse,
  SchemaResponse,
} from '../src/api.js';

export const FEATURES = [
  ['Average crystal size (nm)', 'crystal_size', 'nm', 'catalyst-property', 3.33, 25.3],
  ['Crystallinity index (%)', 'crystallinity_index', '%', 'catalyst-property', 4.44, 94.03],
  ['BET surface area (m²/g)', 'bet_area', 'm²/g', 'catalyst-property', 5.7, 322],
  ['Pore volume (cm³/g)', 'pore_volume', 'cm³/g', 'catalyst-property', 0.02, 0.91],
  ['Catalyst loading (g)', 'catalyst_loading', 'g', 'operating-condition', 0.1, 100],
  ['Carrier gas flow rate (mL/min)', 'gas_flow', 'mL/min', 'operating-condition', 5, 1000],
  ['Steam-to-carbon molar ratio (-)', 'steam_carbon_ratio', '-', 'operating-condition', 0.5, 8],
  ['Carrier gas initial temperature (°C)', 'gas_initial_temp', '°C', 'operating-condition', 20, 400],
  ['Reaction temperature (°C)', 'reaction_temp', '°C', 'operating-condition', 300, 900],
  ['Reaction time (min)', 'reaction_time', 'min', 'operating-condition', 5, 1000],
  ['Reactor inner diameter (mm)', 'reactor_diameter', 'mm', 'operating-condition', 4, 100],
] as const;

export const TARGETS = [
  ['Toluene conversion (%)', 'conversion', '%'],
  ['H2 (mol%)', 'h2', 'mol%'],
  ['CO (mol%)', 'co', 'mol%'],
  ['CO2 (mol%)', 'co2', 'mol%'],
  ['CH4 (mol%)', 'ch4', 'mol%'],
] as const;

export const FEATURE_KEYS = FEATURES.map((f) => f[1]);

export function schemaResponse(): SchemaResponse {
  return {
    features: FEATURES.map(([name, key, unit, kind, min, max]) => ({
      name, key, unit, kind, min, max,
    })),
    targets: TARGETS.map(([name, key, unit]) => ({
      name, key, unit, kind: 'target', min: 0, max: 100,
    })),
    model_version: 'v1:test',
  };
}

export function predictResponse(
  features: Record<string, number>,
  flagged: string[] = [],
): PredictResponse {
  const extrapolation: Record<string, boolean> = {};
  for (const key of FEATURE_KEYS) extrapolation[key] = flagged.includes(key);
  return {
    features,
    predictions: {
      conversion: 62.51231250000001,
      h2: 71.0400000400171,
      co: 9.125,
      co2: 4.001953125,
      ch4: 3.3333333333333335,
    },
    extrapolation,
    model_version: 'v1:test',
  };
}

export function explainResponse(): ExplainResponse {
  const zeros: Record<string, number> = {};
  for (const key of FEATURE_KEYS) zeros[key] = 0;
  return {
    explanations: [
      {
        target: 'Toluene conversion (%)',
        base_value: 55.125,
        prediction: 62.51231250000001,
        values: {
          ...zeros,
          reaction_temp: 9.5,
          steam_carbon_ratio: -3.25,
          bet_area: 1.1373125000000072,
        },
        order: ['reaction_temp', 'steam_carbon_ratio', 'bet_area',
                ...FEATURE_KEYS.filter((k) =>
                  !['reaction_temp', 'steam_carbon_ratio', 'bet_area'].includes(k))],
        group_percent: {
          'operating-condition': 91.81640625,
          'catalyst-property': 8.18359375,
        },
      },
      {
        target: 'H2 (mol%)',
        base_value: 71.0400000400171,
        prediction: 71.0400000400171,
        values: zeros,
        order: [...FEATURE_KEYS],
        group_percent: null,
      },
    ],
    model_version: 'v1:test',
  };
}

export function optimizeResponse(): OptimizeResponse {
  const mk = (temp: number, conv: number) => {
    const decision: Record<string, number> = {};
    FEATURE_KEYS.forEach((key, i) => {
      decision[key] = key === 'reaction_temp' ? temp : 0.5 + i * 1.0625;
    });
    return {
      decision,
      objectives: {
        conversion: conv, h2: conv - 10.5, co: 100.25 - conv,
        co2: 5.0625, ch4: 2.03125,
      },
    };
  };
  const solutions = [mk(640.1875, 78.40625), mk(700.5, 84.125), mk(725.0625, 90.875)];
  const ranges = (pick: (s: (typeof solutions)[number]) => Record<string, number>) => {
    const out: Record<string, [number, number]> = {};
    for (const key of Object.keys(pick(solutions[0]))) {
      const vals = solutions.map((s) => pick(s)[key]);
      out[key] = [Math.min(...vals), Math.max(...vals)];
    }
    return out;
  };
  return {
    solutions,
    decision_ranges: ranges((s) => s.decision),
    objective_ranges: ranges((s) => s.objectives),
    model_version: 'v1:test',
  };
}

export interface RouteTable {
  [pathPrefix: string]: (body: unknown) => unknown | Promise<unknown>;
}

export interface InterceptedCall {
  path: string;
  body: unknown;
}

/** fetch stand-in that records every call and serves canned payloads. */
export function interceptFetch(routes: RouteTable) {
  const calls: InterceptedCall[] = [];
  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const path = input.replace(/^https?:\/\/[^/]+/, '');
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    calls.push({ path, body });
    for (const [prefix, handler] of Object.entries(routes)) {
      if (path.startsWith(prefix)) {
        const payload = await handler(body);
        if (payload instanceof Error) {
          return new Response(JSON.stringify({ detail: payload.message }),
                              { status: 400 });
        }
        return new Response(JSON.stringify(payload), {
          status: 200,
          headers: { 'Content-Type': 'application/json' },
        });
      }
    }
    return new Response(JSON.stringify({ detail: `no route for ${path}` }),
                        { status: 404 });
  };
  return { fetchFn, calls };
}

export function numericTokens(text: string): string[] {
  return text.match(/-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?/g) ?? [];
}

/** Every numeric literal appearing anywhere in a payload's JSON. */
export function allowedTokens(payloads: unknown[]): Set<string> {
  const allowed = new Set<string>();
  for (const payload of payloads) {
    for (const token of numericTokens(JSON.stringify(payload))) {
      allowed.add(token);
    }
  }
  return allowed;
}
