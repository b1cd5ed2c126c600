//! C ABI for the circle counting pipeline.
//!
//! Images, configurations and reports cross the boundary as opaque handles
//! created and released by this library. Every fallible call returns a
//! [`CcStatus`]; on failure, [`cc_last_error_message`] describes the error
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circlecount::otsu::ToneMap;
use circlecount::{read_pnm, CountReport, Error, GrayImage, PipelineConfig, RgbImage};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DecodeError = 3,
    OutOfRange = 4,
    InternalError = 5,
    Panic = 6,
}

/// Values accepted by [`cc_config_set_tone_map`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcToneMap {
    /// Each class is painted with its mean level (the default).
    ClassMean = 0,
    /// Classes are painted with evenly spaced tones.
    Even = 1,
}

/// One detected circle.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CcCircle {
    pub cx: u32,
    pub cy: u32,
    pub radius: u32,
    pub votes: u32,
    pub score: f64,
}

/// Opaque RGB frame.
pub struct CcImage {
    inner: RgbImage,
}

/// Opaque pipeline configuration.
pub struct CcConfig {
    inner: PipelineConfig,
}

/// Opaque result of one counting run.
pub struct CcReport {
    inner: CountReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> CcStatus {
    match err {
        Error::MalformedHeader(_)
        | Error::UnsupportedMaxval(_)
        | Error::TruncatedPayload { .. } => CcStatus::DecodeError,
        Error::InvalidSigma(_)
        | Error::InvalidClassCount(_)
        | Error::InvalidParams(_)
        | Error::InvalidDimensions { .. }
        | Error::ImageTooSmall { .. } => CcStatus::InvalidArgument,
        _ => CcStatus::InternalError,
    }
}

fn fail(err: Error) -> CcStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn guard(f: impl FnOnce() -> CcStatus) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic inside circlecount");
            CcStatus::Panic
        }
    }
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn input_slice<'a>(data: *const u8, len: usize) -> Option<&'a [u8]> {
    if data.is_null() {
        return (len == 0).then_some(&[]);
    }
    Some(std::slice::from_raw_parts(data, len))
}

fn store_image(out: *mut *mut CcImage, img: RgbImage) -> CcStatus {
    unsafe { *out = Box::into_raw(Box::new(CcImage { inner: img })) };
    CcStatus::Ok
}

/// Copies `len == 3 * width * height` interleaved RGB bytes into a new image.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_image_from_rgb(
    width: usize,
    height: usize,
    data: *const u8,
    len: usize,
    out: *mut *mut CcImage,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return CcStatus::NullPointer;
        }
        let Some(bytes) = input_slice(data, len) else {
            return CcStatus::NullPointer;
        };
        match RgbImage::from_raw(width, height, bytes.to_vec()) {
            Ok(img) => store_image(out, img),
            Err(e) => fail(e),
        }
    })
}

/// Copies `len == width * height` gray bytes into a new image, replicated
/// into three channels.
///
/// # Safety
/// As for [`cc_image_from_rgb`].
#[no_mangle]
pub unsafe extern "C" fn cc_image_from_gray(
    width: usize,
    height: usize,
    data: *const u8,
    len: usize,
    out: *mut *mut CcImage,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return CcStatus::NullPointer;
        }
        let Some(bytes) = input_slice(data, len) else {
            return CcStatus::NullPointer;
        };
        match GrayImage::from_raw(width, height, bytes.to_vec()) {
            Ok(img) => store_image(out, img.to_rgb()),
            Err(e) => fail(e),
        }
    })
}

/// Decodes a binary P5 or P6 stream.
///
/// # Safety
/// `bytes` must point to `len` readable bytes and `out` to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_image_decode_pnm(
    bytes: *const u8,
    len: usize,
    out: *mut *mut CcImage,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return CcStatus::NullPointer;
        }
        let Some(bytes) = input_slice(bytes, len) else {
            return CcStatus::NullPointer;
        };
        match read_pnm(bytes) {
            Ok(img) => store_image(out, img.into_rgb()),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `image` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_image_width(image: *const CcImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.width())
}

/// # Safety
/// `image` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_image_height(image: *const CcImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.height())
}

/// # Safety
/// `image` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_image_free(image: *mut CcImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// New configuration holding the default parameters.
#[no_mangle]
pub extern "C" fn cc_config_new() -> *mut CcConfig {
    Box::into_raw(Box::new(CcConfig {
        inner: PipelineConfig::default(),
    }))
}

/// # Safety
/// `config` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_config_free(config: *mut CcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Applies `edit` to a copy and commits it only if the result validates.
unsafe fn edit_config(config: *mut CcConfig, edit: impl FnOnce(&mut PipelineConfig)) -> CcStatus {
    guard(|| {
        let Some(cfg) = config.as_mut() else {
            return CcStatus::NullPointer;
        };
        let mut next = cfg.inner;
        edit(&mut next);
        match next.validate() {
            Ok(()) => {
                cfg.inner = next;
                CcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `config` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_config_set_sigma(config: *mut CcConfig, sigma: f64) -> CcStatus {
    edit_config(config, |c| c.sigma = sigma)
}

/// `classes` must be 2 or 4.
///
/// # Safety
/// `config` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_config_set_otsu_classes(
    config: *mut CcConfig,
    classes: u32,
) -> CcStatus {
    edit_config(config, |c| c.otsu_classes = classes as usize)
}

/// `tone_map` is a [`CcToneMap`] value.
///
/// # Safety
/// `config` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_config_set_tone_map(config: *mut CcConfig, tone_map: u32) -> CcStatus {
    let tones = match tone_map {
        0 => ToneMap::ClassMean,
        1 => ToneMap::Even,
        other => {
            set_error(format!("unknown tone map {other}"));
            return CcStatus::InvalidArgument;
        }
    };
    edit_config(config, |c| c.tones = tones)
}

/// # Safety
/// `config` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_config_set_radius_range(
    config: *mut CcConfig,
    r_min: u32,
    r_max: u32,
) -> CcStatus {
    edit_config(config, |c| {
        c.hough.r_min = r_min as usize;
        c.hough.r_max = r_max as usize;
    })
}

/// # Safety
/// `config` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_config_set_theta_step(config: *mut CcConfig, degrees: u32) -> CcStatus {
    edit_config(config, |c| c.hough.theta_step = degrees)
}

/// # Safety
/// `config` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_config_set_vote_fraction(
    config: *mut CcConfig,
    fraction: f64,
) -> CcStatus {
    edit_config(config, |c| c.hough.vote_fraction = fraction)
}

/// # Safety
/// `config` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_config_set_min_center_dist(
    config: *mut CcConfig,
    pixels: f64,
) -> CcStatus {
    edit_config(config, |c| c.hough.min_center_dist = pixels)
}

/// Runs the full pipeline. A NULL `config` means the defaults.
///
/// # Safety
/// `image` must be a live image handle, `config` NULL or a live config
/// handle, and `out` writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_count(
    image: *const CcImage,
    config: *const CcConfig,
    out: *mut *mut CcReport,
) -> CcStatus {
    guard(|| {
        let (Some(image), false) = (image.as_ref(), out.is_null()) else {
            return CcStatus::NullPointer;
        };
        let cfg = config
            .as_ref()
            .map_or_else(PipelineConfig::default, |c| PipelineConfig {
                dump_stages: false,
                ..c.inner
            });
        match circlecount::run(&image.inner, &cfg, "ffi") {
            Ok((report, _)) => {
                *out = Box::into_raw(Box::new(CcReport { inner: report }));
                CcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `report` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_report_count(report: *const CcReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.count)
}

/// True when the frame had too few intensity levels to threshold.
///
/// # Safety
/// `report` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_report_degenerate(report: *const CcReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.degenerate)
}

/// Total pipeline time in microseconds.
///
/// # Safety
/// `report` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cc_report_elapsed_us(report: *const CcReport) -> u64 {
    report
        .as_ref()
        .map_or(0, |r| r.inner.total_time().as_micros() as u64)
}

/// Copies detection `index` (strongest first) into `out`.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_report_circle(
    report: *const CcReport,
    index: usize,
    out: *mut CcCircle,
) -> CcStatus {
    guard(|| {
        let (Some(report), Some(out)) = (report.as_ref(), out.as_mut()) else {
            return CcStatus::NullPointer;
        };
        let Some(c) = report.inner.circles.get(index) else {
            set_error(format!(
                "circle index {index} out of range for {} detections",
                report.inner.count
            ));
            return CcStatus::OutOfRange;
        };
        *out = CcCircle {
            cx: c.cx as u32,
            cy: c.cy as u32,
            radius: c.radius as u32,
            votes: c.votes,
            score: c.score,
        };
        CcStatus::Ok
    })
}

/// # Safety
/// `report` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_report_free(report: *mut CcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
