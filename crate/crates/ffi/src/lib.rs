//! C ABI over `e8spread`.
//!
//! Every fallible function returns an [`E8Status`]; on failure a message is
//! available from [`e8_last_error`] on the same thread. Handles are opaque
//! and must be released with [`e8_pipeline_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use e8spread::autgroup;
use e8spread::pipeline::{self, CertifyOptions, Context};
use e8spread::{Error, FrameArray, Lattice, LatticeVector, Norm4Partition, SpaceClass, Spread};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum E8Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Verification = 3,
    Parse = 4,
    Io = 5,
    Panic = 6,
}

/// Spread classes accepted by [`e8_pipeline_new`].
pub const E8_CLASS_A: u32 = 0;
pub const E8_CLASS_B: u32 = 1;

/// Opaque pipeline state: the spread, frame array and partition of one
/// class, plus the stabilizer once requested.
pub struct E8Pipeline {
    ctx: Context,
    spread: Spread,
    frames: FrameArray,
    partition: Norm4Partition,
    labels: Vec<usize>,
    group_order: Option<u64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> E8Status {
    match e {
        Error::Parse { .. } => E8Status::Parse,
        Error::Io(_) => E8Status::Io,
        _ => E8Status::Verification,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (E8Status, String)>) -> E8Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => E8Status::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            E8Status::Panic
        }
    }
}

fn lib_err(e: Error) -> (E8Status, String) {
    (status_of(&e), e.to_string())
}

fn bad(status: E8Status, msg: &str) -> (E8Status, String) {
    (status, msg.to_string())
}

fn class_of(class: u32) -> Result<SpaceClass, (E8Status, String)> {
    match class {
        E8_CLASS_A => Ok(SpaceClass::A),
        E8_CLASS_B => Ok(SpaceClass::B),
        _ => Err(bad(E8Status::InvalidArgument, "class must be E8_CLASS_A or E8_CLASS_B")),
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn e8_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn e8_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds and certifies the spread, frame array and partition for `class`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn e8_pipeline_new(class: u32, out: *mut *mut E8Pipeline) -> E8Status {
    guard(|| {
        if out.is_null() {
            return Err(bad(E8Status::NullPointer, "out is NULL"));
        }
        let class = class_of(class)?;
        let ctx = Context::e8().map_err(lib_err)?;
        let (spread, _) = pipeline::spread_stage(&ctx, class).map_err(lib_err)?;
        let (frames, _) = pipeline::frames_stage(&ctx, &spread).map_err(lib_err)?;
        let (partition, _) = pipeline::partition_stage(&ctx, &frames, &spread).map_err(lib_err)?;
        let labels = partition
            .block_of(&ctx.shells)
            .into_iter()
            .map(|b| b.ok_or_else(|| bad(E8Status::Verification, "partition misses a vector")))
            .collect::<Result<_, _>>()?;
        let p = E8Pipeline { ctx, spread, frames, partition, labels, group_order: None };
        // SAFETY: checked non-null; the caller guarantees it is writable
        unsafe { *out = Box::into_raw(Box::new(p)) };
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `p` must be NULL or a handle from [`e8_pipeline_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn e8_pipeline_free(p: *mut E8Pipeline) {
    if !p.is_null() {
        // SAFETY: per the contract above
        drop(unsafe { Box::from_raw(p) });
    }
}

unsafe fn handle<'a>(p: *const E8Pipeline) -> Result<&'a E8Pipeline, (E8Status, String)> {
    // SAFETY: caller passes NULL or a live handle
    unsafe { p.as_ref() }.ok_or_else(|| bad(E8Status::NullPointer, "pipeline handle is NULL"))
}

/// Writes the four basis rows (bit i = coordinate i mod 2) of spread
/// member `index` (0..9) to `rows_out`.
///
/// # Safety
/// `p` must be a live handle and `rows_out` must point to 4 writable bytes.
#[no_mangle]
pub unsafe extern "C" fn e8_pipeline_spread_space(p: *const E8Pipeline, index: usize, rows_out: *mut u8) -> E8Status {
    guard(|| {
        let p = unsafe { handle(p)? };
        if rows_out.is_null() {
            return Err(bad(E8Status::NullPointer, "rows_out is NULL"));
        }
        let space = p.spread.spaces.get(index).ok_or_else(|| bad(E8Status::InvalidArgument, "index out of range"))?;
        for (i, r) in space.rows().iter().enumerate() {
            // SAFETY: caller provides 4 bytes and spread members have 4 rows
            unsafe { *rows_out.add(i) = r.0 };
        }
        Ok(())
    })
}

/// Writes the 8 sorted root-pair ids of frame `(row, col)` to `ids_out`.
///
/// # Safety
/// `p` must be a live handle and `ids_out` must point to 8 writable `u32`.
#[no_mangle]
pub unsafe extern "C" fn e8_pipeline_frame_roots(p: *const E8Pipeline, row: usize, col: usize, ids_out: *mut u32) -> E8Status {
    guard(|| {
        let p = unsafe { handle(p)? };
        if ids_out.is_null() {
            return Err(bad(E8Status::NullPointer, "ids_out is NULL"));
        }
        let f = p
            .frames
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .ok_or_else(|| bad(E8Status::InvalidArgument, "frame position out of range"))?;
        for (i, id) in f.roots.iter().enumerate() {
            // SAFETY: caller provides 8 slots
            unsafe { *ids_out.add(i) = *id as u32 };
        }
        Ok(())
    })
}

/// Block (0..9) containing the norm-4 vector with basis coordinates
/// `coords[0..8]`.
///
/// # Safety
/// `p` must be a live handle, `coords` must point to 8 readable `i64` and
/// `block_out` to one writable `u32`.
#[no_mangle]
pub unsafe extern "C" fn e8_pipeline_block_of(p: *const E8Pipeline, coords: *const i64, block_out: *mut u32) -> E8Status {
    guard(|| {
        let p = unsafe { handle(p)? };
        if coords.is_null() || block_out.is_null() {
            return Err(bad(E8Status::NullPointer, "coords or block_out is NULL"));
        }
        // SAFETY: caller provides 8 coordinates
        let v: [i64; 8] = unsafe { std::slice::from_raw_parts(coords, 8) }.try_into().expect("eight");
        let i = p
            .ctx
            .shells
            .norm4_index(&LatticeVector(v))
            .ok_or_else(|| bad(E8Status::InvalidArgument, "not a norm-4 vector"))?;
        // SAFETY: checked non-null
        unsafe { *block_out = p.labels[i] as u32 };
        Ok(())
    })
}

/// Number of blocks in the partition (9).
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn e8_pipeline_block_count(p: *const E8Pipeline) -> usize {
    // SAFETY: caller passes NULL or a live handle
    unsafe { p.as_ref() }.map_or(0, |p| p.partition.blocks.len())
}

/// Computes (once) and returns the order of the partition's stabilizer.
///
/// # Safety
/// `p` must be a live handle and `order_out` must point to one writable
/// `u64`.
#[no_mangle]
pub unsafe extern "C" fn e8_pipeline_group_order(p: *mut E8Pipeline, order_out: *mut u64) -> E8Status {
    guard(|| {
        // SAFETY: caller passes NULL or a live handle
        let p = unsafe { p.as_mut() }.ok_or_else(|| bad(E8Status::NullPointer, "pipeline handle is NULL"))?;
        if order_out.is_null() {
            return Err(bad(E8Status::NullPointer, "order_out is NULL"));
        }
        let order = match p.group_order {
            Some(o) => o,
            None => {
                let search = autgroup::stabilizer_generators(&p.frames, &p.partition, &p.ctx.shells).map_err(lib_err)?;
                let o = search.group.order() as u64;
                p.group_order = Some(o);
                o
            }
        };
        // SAFETY: checked non-null
        unsafe { *order_out = order };
        Ok(())
    })
}

/// Runs the full certification and writes the artifacts to `dir`.
///
/// # Safety
/// `dir` must be a valid nul-terminated path.
#[no_mangle]
pub unsafe extern "C" fn e8_certify_to_directory(dir: *const c_char, class: u32, skip_group: bool) -> E8Status {
    guard(|| {
        if dir.is_null() {
            return Err(bad(E8Status::NullPointer, "dir is NULL"));
        }
        // SAFETY: caller passes a nul-terminated string
        let dir = unsafe { CStr::from_ptr(dir) }.to_str().map_err(|_| bad(E8Status::InvalidArgument, "dir is not UTF-8"))?;
        let opts = CertifyOptions { class: class_of(class)?, out_dir: Some(PathBuf::from(dir)), skip_group };
        pipeline::certify(&Lattice::e8(), &opts).map_err(lib_err)?;
        Ok(())
    })
}

/// Re-verifies `count` artifact files.
///
/// # Safety
/// `paths` must point to `count` valid nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn e8_verify_files(paths: *const *const c_char, count: usize) -> E8Status {
    guard(|| {
        if paths.is_null() {
            return Err(bad(E8Status::NullPointer, "paths is NULL"));
        }
        // SAFETY: caller provides `count` entries
        let raw = unsafe { std::slice::from_raw_parts(paths, count) };
        let files = raw
            .iter()
            .map(|&s| {
                if s.is_null() {
                    return Err(bad(E8Status::NullPointer, "path is NULL"));
                }
                // SAFETY: caller passes nul-terminated strings
                let s = unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| bad(E8Status::InvalidArgument, "path is not UTF-8"))?;
                Ok(PathBuf::from(s))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ctx = Context::e8().map_err(lib_err)?;
        pipeline::verify_files(&ctx, &files).map_err(lib_err)?;
        Ok(())
    })
}
