/* tslint:disable */
/* eslint-disable */

export class FixedPoint {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `max |x - exact| / exact`
     */
    maxRelError(): number;
    readonly converged: boolean;
    readonly exact: Float64Array;
    readonly iterations: number;
    readonly t: Float64Array;
    readonly x: Float64Array;
}

/**
 * Largest relative error of the discrete `I^α E_α(ξ u^α)` against
 * `(E_α(ξ u^α) - 1)/ξ` on `[0, 1]` with an `n`-interval graded grid.
 */
export function closedFormResidual(alpha: number, xi: number, psi: string, psi_param: number, n: number): number;

/**
 * `E_α(z)`.
 */
export function mlEval(alpha: number, z: number): number;

/**
 * Picard solve of `x = 1 + I^α(λx)` on `[0, 1]`; the solution is `E_α(λ t^α)`.
 */
export function solveLinear(alpha: number, lambda: number, n: number): FixedPoint;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_fixedpoint_free: (a: number, b: number) => void;
    readonly closedFormResidual: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly fixedpoint_converged: (a: number) => number;
    readonly fixedpoint_exact: (a: number) => [number, number];
    readonly fixedpoint_iterations: (a: number) => number;
    readonly fixedpoint_maxRelError: (a: number) => number;
    readonly fixedpoint_t: (a: number) => [number, number];
    readonly fixedpoint_x: (a: number) => [number, number];
    readonly mlEval: (a: number, b: number) => [number, number, number];
    readonly solveLinear: (a: number, b: number, c: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
