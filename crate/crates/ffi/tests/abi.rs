use std::ffi::CStr;
use std::ptr;

use circlecount::imagebuf::write_pgm;
use circlecount::synth::{render, SceneSpec, PALETTE};
use circlecount::GrayImage;
use circlecount_ffi::*;

fn last_error() -> String {
    let p = cc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn scene() -> Vec<u8> {
    let spec = SceneSpec::new(200, 120, [150, 150, 150])
        .with_disk(50, 60, 30, PALETTE[0])
        .with_disk(140, 60, 25, PALETTE[3]);
    render(&spec).unwrap().0.into_raw()
}

#[test]
fn count_two_disks() {
    let rgb = scene();
    unsafe {
        let mut img = ptr::null_mut();
        assert_eq!(
            cc_image_from_rgb(200, 120, rgb.as_ptr(), rgb.len(), &mut img),
            CcStatus::Ok
        );
        assert_eq!((cc_image_width(img), cc_image_height(img)), (200, 120));

        let mut report = ptr::null_mut();
        assert_eq!(cc_count(img, ptr::null(), &mut report), CcStatus::Ok);
        assert_eq!(cc_report_count(report), 2);
        assert!(!cc_report_degenerate(report));

        let mut found = Vec::new();
        for i in 0..2 {
            let mut c = CcCircle::default();
            assert_eq!(cc_report_circle(report, i, &mut c), CcStatus::Ok);
            found.push((c.cx, c.cy));
        }
        found.sort();
        assert!(
            found[0].0.abs_diff(50) <= 2 && found[1].0.abs_diff(140) <= 2,
            "{found:?}"
        );

        let mut c = CcCircle::default();
        assert_eq!(cc_report_circle(report, 2, &mut c), CcStatus::OutOfRange);
        assert!(last_error().contains("out of range"));

        cc_report_free(report);
        cc_image_free(img);
    }
}

#[test]
fn config_setters_validate() {
    unsafe {
        let cfg = cc_config_new();
        assert_eq!(cc_config_set_sigma(cfg, 2.0), CcStatus::Ok);
        assert_eq!(cc_config_set_sigma(cfg, -1.0), CcStatus::InvalidArgument);
        assert!(last_error().contains("sigma"));
        assert_eq!(
            cc_config_set_otsu_classes(cfg, 3),
            CcStatus::InvalidArgument
        );
        assert_eq!(cc_config_set_otsu_classes(cfg, 2), CcStatus::Ok);
        assert_eq!(
            cc_config_set_tone_map(cfg, CcToneMap::Even as u32),
            CcStatus::Ok
        );
        assert_eq!(cc_config_set_tone_map(cfg, 7), CcStatus::InvalidArgument);
        assert_eq!(
            cc_config_set_radius_range(cfg, 30, 20),
            CcStatus::InvalidArgument
        );
        assert_eq!(cc_config_set_radius_range(cfg, 20, 30), CcStatus::Ok);
        assert_eq!(cc_config_set_theta_step(cfg, 7), CcStatus::InvalidArgument);
        assert_eq!(cc_config_set_theta_step(cfg, 2), CcStatus::Ok);
        assert_eq!(
            cc_config_set_vote_fraction(cfg, 0.0),
            CcStatus::InvalidArgument
        );
        assert_eq!(cc_config_set_vote_fraction(cfg, 0.7), CcStatus::Ok);
        assert_eq!(
            cc_config_set_min_center_dist(cfg, 0.5),
            CcStatus::InvalidArgument
        );
        assert_eq!(cc_config_set_min_center_dist(cfg, 15.0), CcStatus::Ok);
        assert_eq!(
            cc_config_set_sigma(ptr::null_mut(), 1.0),
            CcStatus::NullPointer
        );

        // A rejected setter leaves the earlier value in place.
        let rgb = scene();
        let mut img = ptr::null_mut();
        assert_eq!(
            cc_image_from_rgb(200, 120, rgb.as_ptr(), rgb.len(), &mut img),
            CcStatus::Ok
        );
        let mut report = ptr::null_mut();
        assert_eq!(cc_count(img, cfg, &mut report), CcStatus::Ok);
        assert_eq!(cc_report_count(report), 2);
        cc_report_free(report);
        cc_image_free(img);
        cc_config_free(cfg);
    }
}

#[test]
fn decode_and_degenerate() {
    let pgm = write_pgm(&GrayImage::new(40, 30));
    unsafe {
        let mut img = ptr::null_mut();
        assert_eq!(
            cc_image_decode_pnm(pgm.as_ptr(), pgm.len(), &mut img),
            CcStatus::Ok
        );
        let mut report = ptr::null_mut();
        assert_eq!(cc_count(img, ptr::null(), &mut report), CcStatus::Ok);
        assert_eq!(cc_report_count(report), 0);
        assert!(cc_report_degenerate(report));
        cc_report_free(report);
        cc_image_free(img);

        let mut bad = ptr::null_mut();
        let cut = &pgm[..pgm.len() - 5];
        assert_eq!(
            cc_image_decode_pnm(cut.as_ptr(), cut.len(), &mut bad),
            CcStatus::DecodeError
        );
        assert!(bad.is_null());
        assert_eq!(
            cc_image_decode_pnm(b"P9".as_ptr(), 2, &mut bad),
            CcStatus::DecodeError
        );
    }
}

#[test]
fn null_and_size_errors() {
    unsafe {
        let mut img = ptr::null_mut();
        assert_eq!(
            cc_image_from_gray(4, 4, ptr::null(), 16, &mut img),
            CcStatus::NullPointer
        );
        let data = [0u8; 15];
        assert_eq!(
            cc_image_from_gray(4, 4, data.as_ptr(), data.len(), &mut img),
            CcStatus::InvalidArgument
        );
        assert_eq!(
            cc_image_from_rgb(4, 4, data.as_ptr(), data.len(), ptr::null_mut()),
            CcStatus::NullPointer
        );
        let mut report = ptr::null_mut();
        assert_eq!(
            cc_count(ptr::null(), ptr::null(), &mut report),
            CcStatus::NullPointer
        );
        assert_eq!(cc_report_count(ptr::null()), 0);
        assert_eq!(cc_image_width(ptr::null()), 0);
        cc_image_free(ptr::null_mut());
        cc_config_free(ptr::null_mut());
        cc_report_free(ptr::null_mut());

        // A flat frame smaller than the radius range still counts zero.
        let gray = [128u8; 16 * 16];
        assert_eq!(
            cc_image_from_gray(16, 16, gray.as_ptr(), gray.len(), &mut img),
            CcStatus::Ok
        );
        assert_eq!(cc_count(img, ptr::null(), &mut report), CcStatus::Ok);
        assert_eq!(cc_report_count(report), 0);
        cc_report_free(report);
        cc_image_free(img);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(cc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
