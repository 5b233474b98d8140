//! C ABI for the spectral laboratory: opaque handles, integer error codes,
//! panic-safe boundaries.
//!
//! The committed header `include/elaspec.h` mirrors this surface; the
//! `header_matches_exports` test keeps the two in sync. Conventions:
//!
//! * Every fallible call returns an `elaspec_status` code; results travel
//!   through out-pointers.
//! * Spectrum tables are opaque `elaspec_spectrum` handles, freed with
//!   `elaspec_spectrum_free`.
//! * Boundary conditions: 0 = Dirichlet, 1 = Neumann. Domains for spectrum
//!   computation: 0 = interval (scalar), 1 = disk (scalar Laplacian),
//!   2 = disk (elastic dispersion).

use elaspec::asymptotics::{
    counting_coefficients, fit_heat_coefficients, heat_coefficients, partition_function,
    GeometryData, HeatTraceSeries,
};
use elaspec::error::Error;
use elaspec::exact::{elastic_disk_spectrum, scalar_disk_spectrum, scalar_interval_spectrum};
use elaspec::kernels::{free_kernel, Geometry1D, HeatKernel1D};
use elaspec::moduli::ElasticModuli;
use elaspec::spectrum::{BoundaryCondition, SpectrumTable};
use elaspec::symbol::{boundary_image_term, interior_heat_density};
use libc::{c_char, c_double, c_int, size_t};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes. Matches `elaspec_status` in the header.
pub const ELASPEC_OK: c_int = 0;
pub const ELASPEC_ERR_INVALID_ARGUMENT: c_int = 1;
pub const ELASPEC_ERR_NUMERICS: c_int = 2;
pub const ELASPEC_ERR_CERTIFICATION: c_int = 3;
pub const ELASPEC_ERR_PANIC: c_int = 4;
pub const ELASPEC_ERR_NULL_POINTER: c_int = 5;

fn status_of(err: &Error) -> c_int {
    match err.exit_code() {
        1 => ELASPEC_ERR_INVALID_ARGUMENT,
        3 => ELASPEC_ERR_CERTIFICATION,
        _ => ELASPEC_ERR_NUMERICS,
    }
}

fn guarded<F: FnOnce() -> c_int>(f: F) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => ELASPEC_ERR_PANIC,
    }
}

/// Opaque spectrum handle: a computed eigenvalue table.
pub struct ElaspecSpectrum {
    table: SpectrumTable,
}

fn bc_from(code: c_int) -> Option<BoundaryCondition> {
    match code {
        0 => Some(BoundaryCondition::Dirichlet),
        1 => Some(BoundaryCondition::Neumann),
        _ => None,
    }
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn elaspec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Validate a Lame pair: mu > 0 and mu + lambda >= 0.
#[no_mangle]
pub extern "C" fn elaspec_moduli_check(mu: c_double, lambda: c_double) -> c_int {
    match ElasticModuli::new(mu, lambda) {
        Ok(_) => ELASPEC_OK,
        Err(_) => ELASPEC_ERR_INVALID_ARGUMENT,
    }
}

/// Compute a spectrum table.
///
/// domain: 0 = interval (size = length, `count` eigenvalues),
///         1 = scalar disk (size = radius, up to lambda_max),
///         2 = elastic disk (size = radius, up to lambda_max; mu/lambda used).
/// The handle is written to `out` on success and must be freed with
/// `elaspec_spectrum_free`.
///
/// # Safety
/// `out` must be a valid pointer to writable handle storage.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_compute(
    domain: c_int,
    size: c_double,
    bc: c_int,
    mu: c_double,
    lambda: c_double,
    lambda_max: c_double,
    count: size_t,
    out: *mut *mut ElaspecSpectrum,
) -> c_int {
    if out.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let Some(bc) = bc_from(bc) else {
            return ELASPEC_ERR_INVALID_ARGUMENT;
        };
        let result = match domain {
            0 => scalar_interval_spectrum(size, bc, count as u64),
            1 => scalar_disk_spectrum(size, bc, lambda_max),
            2 => match ElasticModuli::new(mu, lambda) {
                Ok(m) => elastic_disk_spectrum(&m, size, bc, lambda_max),
                Err(e) => Err(e),
            },
            _ => return ELASPEC_ERR_INVALID_ARGUMENT,
        };
        match result {
            Ok(table) => {
                let handle = Box::new(ElaspecSpectrum { table });
                unsafe { *out = Box::into_raw(handle) };
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Multiplicity-weighted number of eigenvalues in the table.
///
/// # Safety
/// `spectrum` must be a live handle from `elaspec_spectrum_compute`.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_len(spectrum: *const ElaspecSpectrum) -> size_t {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { &*spectrum }.table.total_multiplicity() as size_t
}

/// Copy up to `cap` eigenvalues (repeated by multiplicity, ascending) into
/// `buffer`; returns the number written.
///
/// # Safety
/// `spectrum` must be a live handle; `buffer` must point to at least `cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_eigenvalues(
    spectrum: *const ElaspecSpectrum,
    buffer: *mut c_double,
    cap: size_t,
) -> size_t {
    if spectrum.is_null() || buffer.is_null() {
        return 0;
    }
    let flat = unsafe { &*spectrum }.table.flattened();
    let n = flat.len().min(cap);
    unsafe { std::ptr::copy_nonoverlapping(flat.as_ptr(), buffer, n) };
    n
}

/// Certification edge of the table.
///
/// # Safety
/// `spectrum` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_max_reliable(
    spectrum: *const ElaspecSpectrum,
) -> c_double {
    if spectrum.is_null() {
        return f64::NAN;
    }
    unsafe { &*spectrum }.table.max_reliable()
}

/// Counting function N(lambda) of the table; `lambda` must not exceed the
/// certification edge (returns status).
///
/// # Safety
/// `spectrum` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_counting(
    spectrum: *const ElaspecSpectrum,
    lambda: c_double,
    out: *mut size_t,
) -> c_int {
    if spectrum.is_null() || out.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| match unsafe { &*spectrum }.table.counting_function(lambda) {
        Ok(n) => {
            unsafe { *out = n as size_t };
            ELASPEC_OK
        }
        Err(e) => status_of(&e),
    })
}

/// Partition function Z(t) of the table at each of `n_t` grid points.
///
/// # Safety
/// `spectrum` must be a live handle; `t` must hold `n_t` doubles and
/// `out_z` must have room for `n_t` doubles.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_partition_function(
    spectrum: *const ElaspecSpectrum,
    n_dim: c_int,
    t: *const c_double,
    n_t: size_t,
    out_z: *mut c_double,
) -> c_int {
    if spectrum.is_null() || t.is_null() || out_z.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let grid = unsafe { std::slice::from_raw_parts(t, n_t) };
        match partition_function(&unsafe { &*spectrum }.table, grid, n_dim as u32) {
            Ok(series) => {
                unsafe { std::ptr::copy_nonoverlapping(series.z.as_ptr(), out_z, n_t) };
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Free a spectrum handle. Passing NULL is a no-op.
///
/// # Safety
/// `spectrum` must be NULL or a handle from `elaspec_spectrum_compute` not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_free(spectrum: *mut ElaspecSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Two-term heat coefficients (a0, a1, a2) for a disk of the given radius.
/// `sigma_h` is the mean-curvature orientation switch (+1 or -1).
///
/// # Safety
/// The three out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn elaspec_disk_heat_coefficients(
    mu: c_double,
    lambda: c_double,
    radius: c_double,
    bc: c_int,
    sigma_h: c_double,
    out_a0: *mut c_double,
    out_a1: *mut c_double,
    out_a2: *mut c_double,
) -> c_int {
    if out_a0.is_null() || out_a1.is_null() || out_a2.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let Some(bc) = bc_from(bc) else {
            return ELASPEC_ERR_INVALID_ARGUMENT;
        };
        let inner = || -> Result<(f64, f64, f64), Error> {
            let m = ElasticModuli::new(mu, lambda)?;
            let g = GeometryData::disk(radius).with_sigma_h(sigma_h)?;
            let c = heat_coefficients(&m, &g, bc)?;
            Ok((c.a0, c.a1, c.a2))
        };
        match inner() {
            Ok((a0, a1, a2)) => {
                unsafe {
                    *out_a0 = a0;
                    *out_a1 = a1;
                    *out_a2 = a2;
                }
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Two-term counting coefficients for a disk (out_a2 receives 0).
///
/// # Safety
/// The three out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn elaspec_disk_counting_coefficients(
    mu: c_double,
    lambda: c_double,
    radius: c_double,
    bc: c_int,
    out_a0: *mut c_double,
    out_a1: *mut c_double,
    out_a2: *mut c_double,
) -> c_int {
    if out_a0.is_null() || out_a1.is_null() || out_a2.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let Some(bc) = bc_from(bc) else {
            return ELASPEC_ERR_INVALID_ARGUMENT;
        };
        let inner = || -> Result<(f64, f64, f64), Error> {
            let m = ElasticModuli::new(mu, lambda)?;
            let g = GeometryData::disk(radius);
            let c = counting_coefficients(&m, &g, bc)?;
            Ok((c.a0, c.a1, c.a2))
        };
        match inner() {
            Ok((a0, a1, a2)) => {
                unsafe {
                    *out_a0 = a0;
                    *out_a1 = a1;
                    *out_a2 = a2;
                }
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Fit heat-trace coefficients to a certified spectrum handle on an
/// automatic t-grid; writes (a0, a1, a2).
///
/// # Safety
/// `spectrum` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn elaspec_spectrum_fit_heat(
    spectrum: *const ElaspecSpectrum,
    n_dim: c_int,
    num_terms: c_int,
    out_a0: *mut c_double,
    out_a1: *mut c_double,
    out_a2: *mut c_double,
) -> c_int {
    if spectrum.is_null() || out_a0.is_null() || out_a1.is_null() || out_a2.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let table = &unsafe { &*spectrum }.table;
        let inner = || -> Result<HeatTraceSeries, Error> {
            // Leading scales estimated from the table itself.
            let lam = table.max_reliable();
            let count = table.counting_function(lam)? as f64;
            let a0_scale = count / lam.powf(n_dim as f64 / 2.0)
                * elaspec::special::gamma_half(n_dim as u32 + 2)?;
            let grid = elaspec::asymptotics::default_t_grid(
                table,
                n_dim as u32,
                a0_scale,
                -0.5 * a0_scale,
            )?;
            partition_function(table, &grid, n_dim as u32)
        };
        match inner().and_then(|series| {
            fit_heat_coefficients(&series, n_dim as u32, num_terms as usize)
        }) {
            Ok(fit) => {
                unsafe {
                    *out_a0 = fit.a0;
                    *out_a1 = fit.a1;
                    *out_a2 = fit.a2;
                }
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Interior heat density (closed form).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elaspec_interior_heat_density(
    mu: c_double,
    lambda: c_double,
    n_dim: c_int,
    t: c_double,
    out: *mut c_double,
) -> c_int {
    if out.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let inner = || -> Result<f64, Error> {
            let m = ElasticModuli::new(mu, lambda)?;
            interior_heat_density(&m, n_dim as u32, t)
        };
        match inner() {
            Ok(v) => {
                unsafe { *out = v };
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Half-space image boundary term (closed form, magnitude).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elaspec_boundary_image_term(
    mu: c_double,
    lambda: c_double,
    n_dim: c_int,
    t: c_double,
    out: *mut c_double,
) -> c_int {
    if out.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let inner = || -> Result<f64, Error> {
            let m = ElasticModuli::new(mu, lambda)?;
            boundary_image_term(&m, n_dim as u32, t)
        };
        match inner() {
            Ok(v) => {
                unsafe { *out = v };
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Image heat kernel on the half line: K(t, x, y) with the boundary at 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elaspec_halfline_kernel(
    diffusivity: c_double,
    bc: c_int,
    t: c_double,
    x: c_double,
    y: c_double,
    out: *mut c_double,
) -> c_int {
    if out.is_null() {
        return ELASPEC_ERR_NULL_POINTER;
    }
    guarded(|| {
        let Some(bc) = bc_from(bc) else {
            return ELASPEC_ERR_INVALID_ARGUMENT;
        };
        let inner = || -> Result<f64, Error> {
            HeatKernel1D::new(diffusivity, Geometry1D::HalfLine(bc))?.evaluate(t, x, y)
        };
        match inner() {
            Ok(v) => {
                unsafe { *out = v };
                ELASPEC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Free-space 1D heat kernel.
#[no_mangle]
pub extern "C" fn elaspec_free_kernel(
    diffusivity: c_double,
    t: c_double,
    x: c_double,
    y: c_double,
) -> c_double {
    free_kernel(diffusivity, t, x, y)
}
