/* tslint:disable */
/* eslint-disable */

/**
 * `D(t)` for `t = 0..=depth`: the noiseless series followed by the damped
 * one, `2·(depth + 1)` values in total.
 */
export function convergence(n: number, depth: number, ensemble: number, gamma: number, all_ones: boolean, seed: number, m_haar: number): Float64Array;

/**
 * `[θ_c or NaN, brackets, Λ(θ_0), …, Λ(θ_{n−1})]` on `n` evenly spaced
 * angles in `[0, π]`. The undefined point is reported as `+∞`.
 */
export function lambda_profile(gamma: number, n: number): Float64Array;

/**
 * Polar angles `θ, F(θ), F(F(θ)), …` (`steps + 1` values). The orbit stops
 * early if it lands on the undefined point.
 */
export function orbit(theta: number, gamma: number, steps: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly convergence: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly lambda_profile: (a: number, b: number) => [number, number, number, number];
    readonly orbit: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
