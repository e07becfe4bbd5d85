//! Browser bindings: disk scans as RGBA images, single-shape classification
//! and the critical-value catalog.
//!
//! Systems are passed as a preset name or as the text format accepted by
//! `BodySystem::from_str`. The plain functions work natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

use hill3::critical::{critical_catalog, write_catalog_csv};
use hill3::hill::{classify, rotational_budget, shape_eval};
use hill3::scan::{pixel_center, scan_disk};
use hill3::{BodySystem, Shape};

pub fn parse_system(spec: &str) -> Result<BodySystem, String> {
    let spec = spec.trim();
    if hill3::system::PRESETS.contains(&spec) {
        return BodySystem::preset(spec).map_err(|e| e.to_string());
    }
    spec.parse().map_err(|e: hill3::Error| e.to_string())
}

/// `n x n` RGBA pixels, top row first (largest `w2`), in the scan palette.
pub fn disk_rgba(system: &str, nu: f64, n: u32) -> Result<Vec<u8>, String> {
    let system = parse_system(system)?;
    let scan = scan_disk(&system, nu, n as usize).map_err(|e| e.to_string())?;
    let n = n as usize;
    let mut out = Vec::with_capacity(4 * n * n);
    for j in (0..n).rev() {
        for i in 0..n {
            let [r, g, b] = scan.get(i, j).rgb();
            out.extend_from_slice(&[r, g, b, 255]);
        }
    }
    Ok(out)
}

/// Disk coordinates of the centre of canvas pixel `(x, y)` (y downwards).
pub fn canvas_to_disk(x: u32, y: u32, n: u32) -> (f64, f64) {
    let n = n as usize;
    (pixel_center(x as usize, n), pixel_center(n - 1 - y as usize, n))
}

/// One line per quantity: potential, moments, thresholds and the class.
pub fn classify_shape(system: &str, nu: f64, w1: f64, w2: f64) -> Result<String, String> {
    let system = parse_system(system)?;
    let shape = Shape::new(w1, w2).map_err(|e| e.to_string())?;
    let eval = shape_eval(&system, &shape).map_err(|e| e.to_string())?;
    let mut lines = vec![
        format!("shape   ({w1:.4}, {w2:.4}, {:.4})", shape.w3()),
        format!("V~      {:.6}", eval.v_tilde),
        format!(
            "M~      {:.6} {:.6} {:.6}",
            eval.m_tilde[0], eval.m_tilde[1], eval.m_tilde[2]
        ),
        format!(
            "E_R     {:.6} {:.6} {:.6}",
            eval.thresholds[0], eval.thresholds[1], eval.thresholds[2]
        ),
    ];
    if nu > 0.0 && eval.v_tilde < 0.0 {
        lines.push(format!("budget  {:.6}", rotational_budget(eval.v_tilde, nu)));
    }
    lines.push(format!("class   {}", classify(&eval, nu).name()));
    Ok(lines.join("\n"))
}

pub fn catalog_csv(system: &str) -> Result<String, String> {
    let system = parse_system(system)?;
    let mut buf = Vec::new();
    write_catalog_csv(&mut buf, &critical_catalog(&system)).map_err(|e| e.to_string())?;
    String::from_utf8(buf).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = diskRgba)]
pub fn disk_rgba_js(system: &str, nu: f64, n: u32) -> Result<Vec<u8>, JsError> {
    disk_rgba(system, nu, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classifyPixel)]
pub fn classify_pixel_js(system: &str, nu: f64, x: u32, y: u32, n: u32) -> Result<String, JsError> {
    let (w1, w2) = canvas_to_disk(x, y, n);
    classify_shape(system, nu, w1, w2).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = catalogCsv)]
pub fn catalog_csv_js(system: &str) -> Result<String, JsError> {
    catalog_csv(system).map_err(|e| JsError::new(&e))
}
