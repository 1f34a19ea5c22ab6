/* tslint:disable */
/* eslint-disable */

/**
 * Pairs `[s, closed form, numerical estimate]` for each `s` in `s_values`
 * (smallest eigenvalue of σ, in `(0, ½]`).
 */
export function alpha2_profile(s_values: Float64Array, starts: number, seed: bigint): Float64Array;

/**
 * Pairs `[t/t*, worst margin]` for the simple qubit semigroup, where `t*` is
 * the threshold time for `(p, q)`. Forward pairs (`1 < q ≤ p`) use the
 * closed-form 2-log-Sobolev constant; reverse pairs (`p ≤ q < 1`) use ¼.
 */
export function hc_margin_curve(s: number, p: number, q: number, factors: Float64Array, samples: number, seed: bigint): Float64Array;

/**
 * Triples `[n, β exact, lower bound]` for `n = 1..=n_max`. ρ has spectrum
 * `(r, 1−r)` in a basis rotated by `theta` against the eigenbasis of
 * σ = diag(s, 1−s).
 */
export function qht_curve(r: number, s: number, theta: number, eps: number, n_max: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly alpha2_profile: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly hc_margin_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
    readonly qht_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
