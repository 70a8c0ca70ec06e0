/* tslint:disable */
/* eslint-disable */
/**
 * Greedy `eps`-cover of a random union of boxes in `[0, 10]^2` and the
 * overlap multiplicity of the balls `B(x_i, scale * eps)`.
 */
export function cover_plane(eps: number, seed: number, scale: number): CoverReport;
/**
 * Singular values of `f(x) (-d^2/dx^2)^{-gamma/2} f(x)` on a periodic grid
 * and the fitted and predicted Weyl constants, for a Gaussian `f`.
 */
export function weyl_line(gamma: number, width: number, points: number): WeylReport;
/**
 * `tau(e^{-P})` and the residue of `P = xi_1^{2a} + xi_2^{2b}` on `R^2`
 * with the dilation weights that make `P` homogeneous.
 */
export function trace_diagonal(a: number, b: number): TraceReport;
export class CoverReport {
  private constructor();
  free(): void;
  /**
   * Flattened `[x0, y0, x1, y1, ...]`.
   */
  centers: Float64Array;
  /**
   * Flattened `[lo_x, lo_y, hi_x, hi_y, ...]` of the region's boxes.
   */
  boxes: Float64Array;
  /**
   * For each center, the number of centers within `2 * scale * eps`.
   */
  multiplicity: Uint32Array;
  max_multiplicity: number;
  bound: number;
}
export class TraceReport {
  private constructor();
  free(): void;
  weights: Uint32Array;
  order: number;
  homogeneous_dimension: number;
  anisotropic: number;
  direct: number;
  direct_error: number;
  residue: number;
}
export class WeylReport {
  private constructor();
  free(): void;
  predicted: number;
  measured: number;
  stderr: number;
  exponent: number;
  window_lo: number;
  window_hi: number;
  values: Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
  readonly memory: WebAssembly.Memory;
  readonly __wbg_coverreport_free: (a: number, b: number) => void;
  readonly __wbg_get_coverreport_bound: (a: number) => number;
  readonly __wbg_get_coverreport_boxes: (a: number) => [number, number];
  readonly __wbg_get_coverreport_centers: (a: number) => [number, number];
  readonly __wbg_get_coverreport_max_multiplicity: (a: number) => number;
  readonly __wbg_get_coverreport_multiplicity: (a: number) => [number, number];
  readonly __wbg_get_tracereport_direct: (a: number) => number;
  readonly __wbg_get_tracereport_direct_error: (a: number) => number;
  readonly __wbg_get_tracereport_homogeneous_dimension: (a: number) => number;
  readonly __wbg_get_tracereport_order: (a: number) => number;
  readonly __wbg_get_tracereport_residue: (a: number) => number;
  readonly __wbg_get_tracereport_weights: (a: number) => [number, number];
  readonly __wbg_get_weylreport_values: (a: number) => [number, number];
  readonly __wbg_set_coverreport_bound: (a: number, b: number) => void;
  readonly __wbg_set_coverreport_boxes: (a: number, b: number, c: number) => void;
  readonly __wbg_set_coverreport_centers: (a: number, b: number, c: number) => void;
  readonly __wbg_set_coverreport_max_multiplicity: (a: number, b: number) => void;
  readonly __wbg_set_coverreport_multiplicity: (a: number, b: number, c: number) => void;
  readonly __wbg_set_tracereport_direct: (a: number, b: number) => void;
  readonly __wbg_set_tracereport_direct_error: (a: number, b: number) => void;
  readonly __wbg_set_tracereport_homogeneous_dimension: (a: number, b: number) => void;
  readonly __wbg_set_tracereport_order: (a: number, b: number) => void;
  readonly __wbg_set_tracereport_residue: (a: number, b: number) => void;
  readonly __wbg_set_tracereport_weights: (a: number, b: number, c: number) => void;
  readonly __wbg_set_weylreport_values: (a: number, b: number, c: number) => void;
  readonly __wbg_tracereport_free: (a: number, b: number) => void;
  readonly __wbg_weylreport_free: (a: number, b: number) => void;
  readonly cover_plane: (a: number, b: number, c: number) => [number, number, number];
  readonly trace_diagonal: (a: number, b: number) => [number, number, number];
  readonly weyl_line: (a: number, b: number, c: number) => [number, number, number];
  readonly __wbg_set_tracereport_anisotropic: (a: number, b: number) => void;
  readonly __wbg_set_weylreport_exponent: (a: number, b: number) => void;
  readonly __wbg_set_weylreport_measured: (a: number, b: number) => void;
  readonly __wbg_set_weylreport_predicted: (a: number, b: number) => void;
  readonly __wbg_set_weylreport_stderr: (a: number, b: number) => void;
  readonly __wbg_set_weylreport_window_hi: (a: number, b: number) => void;
  readonly __wbg_set_weylreport_window_lo: (a: number, b: number) => void;
  readonly __wbg_get_tracereport_anisotropic: (a: number) => number;
  readonly __wbg_get_weylreport_exponent: (a: number) => number;
  readonly __wbg_get_weylreport_measured: (a: number) => number;
  readonly __wbg_get_weylreport_predicted: (a: number) => number;
  readonly __wbg_get_weylreport_stderr: (a: number) => number;
  readonly __wbg_get_weylreport_window_hi: (a: number) => number;
  readonly __wbg_get_weylreport_window_lo: (a: number) => number;
  readonly __wbindgen_export_0: WebAssembly.Table;
  readonly __wbindgen_free: (a: number, b: number, c: number) => void;
  readonly __wbindgen_malloc: (a: number, b: number) => number;
  readonly __externref_table_dealloc: (a: number) => void;
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
