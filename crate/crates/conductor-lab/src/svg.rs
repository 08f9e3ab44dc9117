//! Plain-text SVG rendering of piecewise-linear functions: a polyline with
//! breakpoint markers, axis labels and per-segment slope annotations.
//! Presentation only; nothing here is ever read back.

use conductor_core::plfun::PLFun;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;

pub fn render_plfun(f: &PLFun, title: &str) -> String {
    let xs: Vec<f64> = f.breakpoints.iter().map(|r| r.to_f64_lossy()).collect();
    let ys: Vec<f64> = f.values.iter().map(|r| r.to_f64_lossy()).collect();
    let (x0, x1) = (xs[0], *xs.last().unwrap());
    let ymin = ys.iter().cloned().fold(f64::INFINITY, f64::min).min(0.0);
    let ymax = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(1.0);
    let xspan = (x1 - x0).max(1e-9);
    let yspan = (ymax - ymin).max(1e-9);
    let px = |x: f64| MARGIN + (x - x0) / xspan * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - ymin) / yspan * (H - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str(&format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"##
    ));
    out.push('\n');
    out.push_str(&format!(
        r##"<text x="{}" y="24" font-family="monospace" font-size="14">{}</text>"##,
        MARGIN,
        escape(title)
    ));
    out.push('\n');
    // axes
    out.push_str(&format!(
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888"/>"##,
        px(x0),
        py(ymin),
        px(x1),
        py(ymin)
    ));
    out.push_str(&format!(
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888"/>"##,
        px(x0),
        py(ymin),
        px(x0),
        py(ymax)
    ));
    out.push('\n');
    // axis labels: exact rational endpoints
    out.push_str(&format!(
        r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">t = {}</text>"##,
        px(x0) - 10.0,
        py(ymin) + 18.0,
        f.breakpoints[0]
    ));
    out.push_str(&format!(
        r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">t = {}</text>"##,
        px(x1) - 30.0,
        py(ymin) + 18.0,
        f.breakpoints.last().unwrap()
    ));
    out.push('\n');
    // polyline
    let pts: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
        .collect();
    out.push_str(&format!(
        r##"<polyline points="{}" fill="none" stroke="#1f6feb" stroke-width="2"/>"##,
        pts.join(" ")
    ));
    out.push('\n');
    // breakpoint markers with exact coordinates
    for ((x, y), (bp, val)) in xs.iter().zip(&ys).zip(f.breakpoints.iter().zip(&f.values)) {
        out.push_str(&format!(
            r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#d1242f"/>"##,
            px(*x),
            py(*y)
        ));
        out.push_str(&format!(
            r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11">({}, {})</text>"##,
            px(*x) + 6.0,
            py(*y) - 6.0,
            bp,
            val
        ));
        out.push('\n');
    }
    // slope annotations at segment midpoints
    for ((a, b), slope) in f.slopes() {
        let xm = (a.to_f64_lossy() + b.to_f64_lossy()) / 2.0;
        let ym = (f.eval(&a).unwrap().to_f64_lossy() + f.eval(&b).unwrap().to_f64_lossy()) / 2.0;
        out.push_str(&format!(
            r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" fill="#1a7f37">slope {}</text>"##,
            px(xm),
            py(ym) - 8.0,
            slope
        ));
        out.push('\n');
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
