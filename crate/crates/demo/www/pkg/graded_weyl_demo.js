let wasm;

const cachedTextDecoder = (typeof TextDecoder !== 'undefined' ? new TextDecoder('utf-8', { ignoreBOM: true, fatal: true }) : { decode: () => { throw Error('TextDecoder not available') } } );

if (typeof TextDecoder !== 'undefined') { cachedTextDecoder.decode(); };

let cachedUint8ArrayMemory0 = null;

function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let cachedFloat64ArrayMemory0 = null;

function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let WASM_VECTOR_LEN = 0;

function passArrayF64ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 8, 8) >>> 0;
    getFloat64ArrayMemory0().set(arg, ptr / 8);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

let cachedUint32ArrayMemory0 = null;

function getUint32ArrayMemory0() {
    if (cachedUint32ArrayMemory0 === null || cachedUint32ArrayMemory0.byteLength === 0) {
        cachedUint32ArrayMemory0 = new Uint32Array(wasm.memory.buffer);
    }
    return cachedUint32ArrayMemory0;
}

function getArrayU32FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint32ArrayMemory0().subarray(ptr / 4, ptr / 4 + len);
}

function passArray32ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 4, 4) >>> 0;
    getUint32ArrayMemory0().set(arg, ptr / 4);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_export_0.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}
/**
 * Greedy `eps`-cover of a random union of boxes in `[0, 10]^2` and the
 * overlap multiplicity of the balls `B(x_i, scale * eps)`.
 * @param {number} eps
 * @param {number} seed
 * @param {number} scale
 * @returns {CoverReport}
 */
export function cover_plane(eps, seed, scale) {
    const ret = wasm.cover_plane(eps, seed, scale);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return CoverReport.__wrap(ret[0]);
}

/**
 * Singular values of `f(x) (-d^2/dx^2)^{-gamma/2} f(x)` on a periodic grid
 * and the fitted and predicted Weyl constants, for a Gaussian `f`.
 * @param {number} gamma
 * @param {number} width
 * @param {number} points
 * @returns {WeylReport}
 */
export function weyl_line(gamma, width, points) {
    const ret = wasm.weyl_line(gamma, width, points);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return WeylReport.__wrap(ret[0]);
}

/**
 * `tau(e^{-P})` and the residue of `P = xi_1^{2a} + xi_2^{2b}` on `R^2`
 * with the dilation weights that make `P` homogeneous.
 * @param {number} a
 * @param {number} b
 * @returns {TraceReport}
 */
export function trace_diagonal(a, b) {
    const ret = wasm.trace_diagonal(a, b);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return TraceReport.__wrap(ret[0]);
}

const CoverReportFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_coverreport_free(ptr >>> 0, 1));

export class CoverReport {

    static __wrap(ptr) {
        ptr = ptr >>> 0;
        const obj = Object.create(CoverReport.prototype);
        obj.__wbg_ptr = ptr;
        CoverReportFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }

    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CoverReportFinalization.unregister(this);
        return ptr;
    }

    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_coverreport_free(ptr, 0);
    }
    /**
     * Flattened `[x0, y0, x1, y1, ...]`.
     * @returns {Float64Array}
     */
    get centers() {
        const ret = wasm.__wbg_get_coverreport_centers(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Flattened `[x0, y0, x1, y1, ...]`.
     * @param {Float64Array} arg0
     */
    set centers(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_coverreport_centers(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * Flattened `[lo_x, lo_y, hi_x, hi_y, ...]` of the region's boxes.
     * @returns {Float64Array}
     */
    get boxes() {
        const ret = wasm.__wbg_get_coverreport_boxes(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Flattened `[lo_x, lo_y, hi_x, hi_y, ...]` of the region's boxes.
     * @param {Float64Array} arg0
     */
    set boxes(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_coverreport_boxes(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * For each center, the number of centers within `2 * scale * eps`.
     * @returns {Uint32Array}
     */
    get multiplicity() {
        const ret = wasm.__wbg_get_coverreport_multiplicity(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * For each center, the number of centers within `2 * scale * eps`.
     * @param {Uint32Array} arg0
     */
    set multiplicity(arg0) {
        const ptr0 = passArray32ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_coverreport_multiplicity(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @returns {number}
     */
    get max_multiplicity() {
        const ret = wasm.__wbg_get_coverreport_max_multiplicity(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @param {number} arg0
     */
    set max_multiplicity(arg0) {
        wasm.__wbg_set_coverreport_max_multiplicity(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get bound() {
        const ret = wasm.__wbg_get_coverreport_bound(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set bound(arg0) {
        wasm.__wbg_set_coverreport_bound(this.__wbg_ptr, arg0);
    }
}

const TraceReportFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_tracereport_free(ptr >>> 0, 1));

export class TraceReport {

    static __wrap(ptr) {
        ptr = ptr >>> 0;
        const obj = Object.create(TraceReport.prototype);
        obj.__wbg_ptr = ptr;
        TraceReportFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }

    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        TraceReportFinalization.unregister(this);
        return ptr;
    }

    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_tracereport_free(ptr, 0);
    }
    /**
     * @returns {Uint32Array}
     */
    get weights() {
        const ret = wasm.__wbg_get_tracereport_weights(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * @param {Uint32Array} arg0
     */
    set weights(arg0) {
        const ptr0 = passArray32ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_tracereport_weights(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @returns {number}
     */
    get order() {
        const ret = wasm.__wbg_get_tracereport_order(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @param {number} arg0
     */
    set order(arg0) {
        wasm.__wbg_set_tracereport_order(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get homogeneous_dimension() {
        const ret = wasm.__wbg_get_tracereport_homogeneous_dimension(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @param {number} arg0
     */
    set homogeneous_dimension(arg0) {
        wasm.__wbg_set_tracereport_homogeneous_dimension(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get anisotropic() {
        const ret = wasm.__wbg_get_coverreport_bound(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set anisotropic(arg0) {
        wasm.__wbg_set_coverreport_bound(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get direct() {
        const ret = wasm.__wbg_get_tracereport_direct(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set direct(arg0) {
        wasm.__wbg_set_tracereport_direct(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get direct_error() {
        const ret = wasm.__wbg_get_tracereport_direct_error(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set direct_error(arg0) {
        wasm.__wbg_set_tracereport_direct_error(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get residue() {
        const ret = wasm.__wbg_get_tracereport_residue(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set residue(arg0) {
        wasm.__wbg_set_tracereport_residue(this.__wbg_ptr, arg0);
    }
}

const WeylReportFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_weylreport_free(ptr >>> 0, 1));

export class WeylReport {

    static __wrap(ptr) {
        ptr = ptr >>> 0;
        const obj = Object.create(WeylReport.prototype);
        obj.__wbg_ptr = ptr;
        WeylReportFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }

    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        WeylReportFinalization.unregister(this);
        return ptr;
    }

    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_weylreport_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get predicted() {
        const ret = wasm.__wbg_get_coverreport_bound(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set predicted(arg0) {
        wasm.__wbg_set_coverreport_bound(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get measured() {
        const ret = wasm.__wbg_get_tracereport_direct(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set measured(arg0) {
        wasm.__wbg_set_tracereport_direct(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get stderr() {
        const ret = wasm.__wbg_get_tracereport_direct_error(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set stderr(arg0) {
        wasm.__wbg_set_tracereport_direct_error(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get exponent() {
        const ret = wasm.__wbg_get_tracereport_residue(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set exponent(arg0) {
        wasm.__wbg_set_tracereport_residue(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get window_lo() {
        const ret = wasm.__wbg_get_tracereport_order(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @param {number} arg0
     */
    set window_lo(arg0) {
        wasm.__wbg_set_tracereport_order(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {number}
     */
    get window_hi() {
        const ret = wasm.__wbg_get_tracereport_homogeneous_dimension(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @param {number} arg0
     */
    set window_hi(arg0) {
        wasm.__wbg_set_tracereport_homogeneous_dimension(this.__wbg_ptr, arg0);
    }
    /**
     * @returns {Float64Array}
     */
    get values() {
        const ret = wasm.__wbg_get_weylreport_values(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {Float64Array} arg0
     */
    set values(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_weylreport_values(this.__wbg_ptr, ptr0, len0);
    }
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);

            } catch (e) {
                if (module.headers.get('Content-Type') != 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else {
                    throw e;
                }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);

    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };

        } else {
            return instance;
        }
    }
}

function __wbg_get_imports() {
    const imports = {};
    imports.wbg = {};
    imports.wbg.__wbindgen_error_new = function(arg0, arg1) {
        const ret = new Error(getStringFromWasm0(arg0, arg1));
        return ret;
    };
    imports.wbg.__wbindgen_init_externref_table = function() {
        const table = wasm.__wbindgen_export_0;
        const offset = table.grow(4);
        table.set(0, undefined);
        table.set(offset + 0, undefined);
        table.set(offset + 1, null);
        table.set(offset + 2, true);
        table.set(offset + 3, false);
        ;
    };
    imports.wbg.__wbindgen_throw = function(arg0, arg1) {
        throw new Error(getStringFromWasm0(arg0, arg1));
    };

    return imports;
}

function __wbg_init_memory(imports, memory) {

}

function __wbg_finalize_init(instance, module) {
    wasm = instance.exports;
    __wbg_init.__wbindgen_wasm_module = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint32ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;


    wasm.__wbindgen_start();
    return wasm;
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (typeof module !== 'undefined') {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();

    __wbg_init_memory(imports);

    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }

    const instance = new WebAssembly.Instance(module, imports);

    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (typeof module_or_path !== 'undefined') {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (typeof module_or_path === 'undefined') {
        module_or_path = new URL('graded_weyl_demo_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    __wbg_init_memory(imports);

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync };
export default __wbg_init;
