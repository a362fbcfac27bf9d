//! C ABI over the `neutralscape` core.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function.  Every call returns an
//! [`NscStatus`]; on failure [`nsc_last_error_message`] describes the cause
//! for the calling thread.  Panics never unwind into C.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use neutralscape::instance::{generate_instance_with, parse_instance_as, write_instance, InstanceFormat};
use neutralscape::landscape::{neutral_walk, summarize_neighborhood, Typology, WalkRecord};
use neutralscape::rng::search_rng;
use neutralscape::search::{run_algorithm, steepest_descent, Acceptance, Algorithm, SearchConfig};
use neutralscape::{scan_insertions, Error, Instance, Permutation, RngMode};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Contract = 4,
    Config = 5,
    Io = 6,
    Degenerate = 7,
    BufferTooSmall = 8,
    NotFound = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NscRngMode {
    Native = 0,
    Taillard = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NscFormat {
    Native = 0,
    Taillard = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NscAlgorithm {
    Ils = 0,
    NeutralGuided = 1,
    Descent = 2,
    Neh = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NscAcceptance {
    Better = 0,
    Metropolis = 1,
    BetterOrEqual = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NscTypology {
    T1 = 1,
    T2 = 2,
    T3 = 3,
}

/// Opaque flowshop instance.
pub struct NscInstance(Instance);

/// Opaque neutral walk record.
pub struct NscWalk(WalkRecord);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NscSearchConfig {
    pub seed: u64,
    pub max_evaluations: u64,
    pub perturbation_strength: usize,
    /// Negative selects the instance-derived default temperature.
    pub metropolis_temperature: f64,
    pub max_neutral_steps: usize,
    /// One of [`NscAcceptance`].
    pub acceptance: u32,
    /// 0 computes evolvability exactly, k > 0 samples k neighbors.
    pub sampled_evolvability: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NscNeighborhoodSummary {
    pub fitness: u64,
    pub neutral_degree: usize,
    pub improving_degree: usize,
    pub neighbor_count: usize,
    pub evolvability: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NscWalkStep {
    pub step: usize,
    pub fitness: u64,
    pub neutral_degree: usize,
    pub evolvability: f64,
    pub is_portal: bool,
    pub revisited: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Fail(NscStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => NscStatus::Parse,
            Error::Contract(_) => NscStatus::Contract,
            Error::Config(_) => NscStatus::Config,
            Error::Degenerate(_) => NscStatus::Degenerate,
            Error::Io { .. } | Error::Json(_) => NscStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn fail(status: NscStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NscStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NscStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NscStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| fail(NscStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| fail(NscStatus::NullPointer, format!("{what} is null")))
}

unsafe fn read_perm(perm: *const usize, len: usize) -> Result<Permutation, Fail> {
    if perm.is_null() {
        return Err(fail(NscStatus::NullPointer, "permutation is null"));
    }
    Ok(Permutation::new(slice::from_raw_parts(perm, len).to_vec())?)
}

unsafe fn write_out(dst: *mut usize, cap: usize, src: &[usize]) -> Result<(), Fail> {
    if dst.is_null() {
        return Err(fail(NscStatus::NullPointer, "output buffer is null"));
    }
    if cap < src.len() {
        return Err(fail(NscStatus::BufferTooSmall, format!("need {} slots, got {cap}", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

fn search_config(c: &NscSearchConfig) -> Result<SearchConfig, Fail> {
    let acceptance = match c.acceptance {
        0 => Acceptance::Better,
        1 => Acceptance::Metropolis,
        2 => Acceptance::BetterOrEqual,
        v => return Err(fail(NscStatus::InvalidArgument, format!("unknown acceptance {v}"))),
    };
    Ok(SearchConfig {
        seed: c.seed,
        max_evaluations: c.max_evaluations,
        perturbation_strength: c.perturbation_strength,
        metropolis_temperature: (c.metropolis_temperature >= 0.0).then_some(c.metropolis_temperature),
        max_neutral_steps: c.max_neutral_steps,
        acceptance,
        sampled_evolvability: (c.sampled_evolvability > 0).then_some(c.sampled_evolvability),
        record_trajectory: false,
    })
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn nsc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn nsc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn nsc_search_config_default() -> NscSearchConfig {
    let d = SearchConfig::default();
    NscSearchConfig {
        seed: d.seed,
        max_evaluations: d.max_evaluations,
        perturbation_strength: d.perturbation_strength,
        metropolis_temperature: -1.0,
        max_neutral_steps: d.max_neutral_steps,
        acceptance: NscAcceptance::Metropolis as u32,
        sampled_evolvability: 0,
    }
}

/// `rng_mode` is one of [`NscRngMode`].
#[no_mangle]
pub unsafe extern "C" fn nsc_instance_generate(
    n_jobs: usize,
    n_machines: usize,
    seed: u64,
    rng_mode: u32,
    out: *mut *mut NscInstance,
) -> NscStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if n_jobs == 0 || n_machines == 0 {
            return Err(fail(NscStatus::InvalidArgument, "n_jobs and n_machines must be positive"));
        }
        let mode = match rng_mode {
            0 => RngMode::Native,
            1 => RngMode::Taillard,
            v => return Err(fail(NscStatus::InvalidArgument, format!("unknown rng mode {v}"))),
        };
        let inst = generate_instance_with(n_jobs, n_machines, seed, mode);
        *out = Box::into_raw(Box::new(NscInstance(inst)));
        Ok(())
    })
}

/// Parses a NUL-terminated instance text; `format` is one of [`NscFormat`].
#[no_mangle]
pub unsafe extern "C" fn nsc_instance_parse(text: *const c_char, format: u32, out: *mut *mut NscInstance) -> NscStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if text.is_null() {
            return Err(fail(NscStatus::NullPointer, "text is null"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| fail(NscStatus::Parse, "instance text is not UTF-8"))?;
        let format = match format {
            0 => InstanceFormat::Native,
            1 => InstanceFormat::Taillard,
            v => return Err(fail(NscStatus::InvalidArgument, format!("unknown format {v}"))),
        };
        *out = Box::into_raw(Box::new(NscInstance(parse_instance_as(text, format)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nsc_instance_free(inst: *mut NscInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nsc_instance_n_jobs(inst: *const NscInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n_jobs())
}

/// 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nsc_instance_n_machines(inst: *const NscInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n_machines())
}

#[no_mangle]
pub unsafe extern "C" fn nsc_instance_time(
    inst: *const NscInstance,
    job: usize,
    machine: usize,
    out: *mut u32,
) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let out = out_ref(out, "out")?;
        if job >= inst.n_jobs() || machine >= inst.n_machines() {
            return Err(fail(NscStatus::InvalidArgument, "job or machine out of range"));
        }
        *out = inst.time(job, machine);
        Ok(())
    })
}

/// Native text serialization; release with [`nsc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nsc_instance_to_text(inst: *const NscInstance, out: *mut *mut c_char) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let out = out_ref(out, "out")?;
        let text = CString::new(write_instance(inst)).map_err(|e| fail(NscStatus::Io, e.to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nsc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `perm` holds `len` distinct 0-based job indices.
#[no_mangle]
pub unsafe extern "C" fn nsc_makespan(
    inst: *const NscInstance,
    perm: *const usize,
    len: usize,
    out: *mut u64,
) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let out = out_ref(out, "out")?;
        *out = neutralscape::makespan(inst, &read_perm(perm, len)?)?;
        Ok(())
    })
}

/// Makespans of reinserting the job at `remove_pos` at every position
/// `0..len`; `out` needs `len` slots.
#[no_mangle]
pub unsafe extern "C" fn nsc_scan_insertions(
    inst: *const NscInstance,
    perm: *const usize,
    len: usize,
    remove_pos: usize,
    out: *mut u64,
    out_len: usize,
) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let values = scan_insertions(inst, &read_perm(perm, len)?, remove_pos)?;
        if out.is_null() {
            return Err(fail(NscStatus::NullPointer, "output buffer is null"));
        }
        if out_len < values.len() {
            return Err(fail(NscStatus::BufferTooSmall, format!("need {} slots, got {out_len}", values.len())));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nsc_neighborhood_summary(
    inst: *const NscInstance,
    perm: *const usize,
    len: usize,
    out: *mut NscNeighborhoodSummary,
) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let out = out_ref(out, "out")?;
        let s = summarize_neighborhood(inst, &read_perm(perm, len)?)?;
        *out = NscNeighborhoodSummary {
            fitness: s.fitness,
            neutral_degree: s.neutral_degree,
            improving_degree: s.improving_degree,
            neighbor_count: s.neighbor_count,
            evolvability: s.evolvability(),
        };
        Ok(())
    })
}

/// Steepest descent from `start`; writes the local optimum to `out_perm`.
#[no_mangle]
pub unsafe extern "C" fn nsc_steepest_descent(
    inst: *const NscInstance,
    start: *const usize,
    len: usize,
    seed: u64,
    out_perm: *mut usize,
    out_fitness: *mut u64,
) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let fitness = out_ref(out_fitness, "out_fitness")?;
        let res = steepest_descent(inst, &read_perm(start, len)?, &mut search_rng(seed))?;
        write_out(out_perm, len, res.best_perm.as_slice())?;
        *fitness = res.best_fitness;
        Ok(())
    })
}

/// Runs `algorithm` (one of [`NscAlgorithm`]).  `out_perm` needs
/// `perm_capacity >= n_jobs` slots; `out_evaluations` may be null.
#[no_mangle]
pub unsafe extern "C" fn nsc_solve(
    inst: *const NscInstance,
    algorithm: u32,
    config: *const NscSearchConfig,
    out_perm: *mut usize,
    perm_capacity: usize,
    out_fitness: *mut u64,
    out_evaluations: *mut u64,
) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let cfg = search_config(deref(config, "config")?)?;
        let fitness = out_ref(out_fitness, "out_fitness")?;
        let algorithm = match algorithm {
            0 => Algorithm::Ils,
            1 => Algorithm::NeutralGuided,
            2 => Algorithm::Descent,
            3 => Algorithm::Neh,
            v => return Err(fail(NscStatus::InvalidArgument, format!("unknown algorithm {v}"))),
        };
        let res = run_algorithm(inst, algorithm, &cfg)?;
        write_out(out_perm, perm_capacity, res.best_perm.as_slice())?;
        *fitness = res.best_fitness;
        if let Some(evals) = out_evaluations.as_mut() {
            *evals = res.evaluations_used;
        }
        Ok(())
    })
}

/// Neutral random walk from a local optimum; release with [`nsc_walk_free`].
#[no_mangle]
pub unsafe extern "C" fn nsc_neutral_walk(
    inst: *const NscInstance,
    start: *const usize,
    len: usize,
    max_steps: usize,
    seed: u64,
    out: *mut *mut NscWalk,
) -> NscStatus {
    guard(|| {
        let inst = &deref(inst, "instance")?.0;
        let out = out_ref(out, "out")?;
        let rec = neutral_walk(inst, &read_perm(start, len)?, max_steps, &mut search_rng(seed))?;
        *out = Box::into_raw(Box::new(NscWalk(rec)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nsc_walk_free(walk: *mut NscWalk) {
    if !walk.is_null() {
        drop(Box::from_raw(walk));
    }
}

/// Number of recorded steps, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nsc_walk_len(walk: *const NscWalk) -> usize {
    walk.as_ref().map_or(0, |w| w.0.len())
}

/// One of [`NscTypology`], 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nsc_walk_typology(walk: *const NscWalk) -> u32 {
    walk.as_ref().map_or(0, |w| match w.0.typology {
        Typology::T1 => NscTypology::T1 as u32,
        Typology::T2 => NscTypology::T2 as u32,
        Typology::T3 => NscTypology::T3 as u32,
    })
}

/// `NotFound` when the walk met no portal.
#[no_mangle]
pub unsafe extern "C" fn nsc_walk_first_portal_step(walk: *const NscWalk, out: *mut usize) -> NscStatus {
    guard(|| {
        let walk = &deref(walk, "walk")?.0;
        let out = out_ref(out, "out")?;
        *out = walk.first_portal_step.ok_or_else(|| fail(NscStatus::NotFound, "walk found no portal"))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nsc_walk_step(walk: *const NscWalk, index: usize, out: *mut NscWalkStep) -> NscStatus {
    guard(|| {
        let walk = &deref(walk, "walk")?.0;
        let out = out_ref(out, "out")?;
        let s = walk
            .steps
            .get(index)
            .ok_or_else(|| fail(NscStatus::InvalidArgument, format!("step {index} out of range")))?;
        *out = NscWalkStep {
            step: s.step,
            fitness: s.fitness,
            neutral_degree: s.neutral_degree,
            evolvability: s.evolvability,
            is_portal: s.is_portal,
            revisited: s.revisited,
        };
        Ok(())
    })
}
