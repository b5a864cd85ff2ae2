//! Deterministic SVG rendering of a construction (d <= 2): avoided
//! rho-spheres, the containment annulus, the cube, and (level -of-detail
//! capped) the thickened balls. Illustrative only; nothing here feeds
//! verification.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::builder::ConstructionManifest;
use crate::{Error, Result};

const SIZE: f64 = 1000.0;
const PAD: f64 = 40.0;
/// Above this many balls a stage is drawn as its block outline only.
const BALL_LOD_CAP: u64 = 4096;
/// Segments per rho-sphere polygon.
const SPHERE_SEGMENTS: usize = 256;

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

/// Render the manifest (or a single stage) as SVG 1.1 text.
pub fn render(m: &ConstructionManifest, stage: Option<usize>) -> Result<String> {
    if let Some(n) = stage {
        if n == 0 || n > m.stages.len() {
            return Err(Error::StageNotFound(n));
        }
    }
    match m.dim {
        1 => render_d1(m, stage),
        2 => render_d2(m, stage),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

fn stage_range(m: &ConstructionManifest, stage: Option<usize>) -> (usize, usize) {
    match stage {
        Some(n) => (n, n),
        None => (1, m.stages.len()),
    }
}

fn render_d1(m: &ConstructionManifest, stage: Option<usize>) -> Result<String> {
    let (first, last) = stage_range(m, stage);
    let top = &m.stages[last - 1];
    let world = top.r.to_f64() * 1.02;
    let scale = (SIZE - 2.0 * PAD) / world;
    let x = |w: f64| PAD + w * scale;
    let axis_y = SIZE / 4.0;

    let mut svg = header(SIZE, SIZE / 2.0);
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        fmt(x(0.0)),
        fmt(axis_y),
        fmt(x(world)),
        fmt(axis_y)
    );
    for st in &m.stages[first - 1..last] {
        let n = st.n;
        let rf = st.r.to_f64();
        // Avoided distance marker.
        if rf <= world {
            let _ = writeln!(
                svg,
                r#"<line class="avoided" x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="red"><title>R_{n}</title></line>"#,
                fmt(x(rf)),
                fmt(axis_y - 24.0),
                fmt(axis_y + 24.0)
            );
        }
        // Containment bounds: 10 R_{n-1} and R_n / 2.
        let inner = 10.0 * m.r_prev(n).to_f64();
        let outer = rf / 2.0;
        for (b, cls) in [(inner, "inner-bound"), (outer, "outer-bound")] {
            if b <= world {
                let _ = writeln!(
                    svg,
                    r#"<line class="{cls}" x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="gray" stroke-dasharray="4 3"/>"#,
                    fmt(x(b)),
                    fmt(axis_y - 14.0),
                    fmt(axis_y + 14.0)
                );
            }
        }
        // Balls (intervals) or the block outline under level-of-detail.
        let count = st.ball_count.to_u64().unwrap_or(u64::MAX);
        let a = st.anchor[0].to_f64().unwrap_or(0.0);
        let r_ball = st.ball_radius.to_f64().unwrap_or(0.0);
        if count <= BALL_LOD_CAP {
            let side = st.side.to_u64().unwrap_or(0);
            for i in 0..=side {
                let c = a + i as f64;
                let _ = writeln!(
                    svg,
                    r#"<rect class="ball" x="{}" y="{}" width="{}" height="10" fill="steelblue"/>"#,
                    fmt(x(c - r_ball)),
                    fmt(axis_y - 5.0),
                    fmt(2.0 * r_ball * scale)
                );
            }
        } else {
            let side = st.side.to_f64().unwrap_or(world);
            let _ = writeln!(
                svg,
                r#"<rect class="block" x="{}" y="{}" width="{}" height="10" fill="steelblue" opacity="0.5"><title>stage {n}: {count} balls</title></rect>"#,
                fmt(x(a - r_ball)),
                fmt(axis_y - 5.0),
                fmt((side + 2.0 * r_ball) * scale)
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn render_d2(m: &ConstructionManifest, stage: Option<usize>) -> Result<String> {
    let (first, last) = stage_range(m, stage);
    let top = &m.stages[last - 1];
    let world = top.r.to_f64() * 1.02;
    let scale = (SIZE - 2.0 * PAD) / (2.0 * world);
    let cx = SIZE / 2.0;
    let px = |wx: f64| cx + wx * scale;
    let py = |wy: f64| cx - wy * scale;

    let mut svg = header(SIZE, SIZE);
    // Unit directions once; each sphere scales them by R / rho(u).
    let dirs: Vec<(f64, f64)> = (0..SPHERE_SEGMENTS)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * (i as f64) / (SPHERE_SEGMENTS as f64);
            (t.cos(), t.sin())
        })
        .collect();
    let sphere_points = |r: f64| -> String {
        let mut pts = String::new();
        for (ux, uy) in &dirs {
            let rho = m.norm.eval_f64(&[*ux, *uy]);
            let f = r / rho;
            let _ = write!(pts, "{},{} ", fmt(px(ux * f)), fmt(py(uy * f)));
        }
        pts.trim_end().to_string()
    };
    for st in &m.stages[first - 1..last] {
        let n = st.n;
        let rf = st.r.to_f64();
        if rf <= world {
            let _ = writeln!(
                svg,
                r#"<polygon class="avoided" points="{}" fill="none" stroke="red"><title>R_{n}</title></polygon>"#,
                sphere_points(rf)
            );
        }
        for (b, cls) in [(10.0 * m.r_prev(n).to_f64(), "inner-bound"), (rf / 2.0, "outer-bound")]
        {
            if b <= world {
                let _ = writeln!(
                    svg,
                    r#"<polygon class="{cls}" points="{}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#,
                    sphere_points(b)
                );
            }
        }
        let a0 = st.anchor[0].to_f64().unwrap_or(0.0);
        let a1 = st.anchor[1].to_f64().unwrap_or(0.0);
        let side = st.side.to_f64().unwrap_or(0.0);
        let _ = writeln!(
            svg,
            r#"<rect class="cube" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="green"/>"#,
            fmt(px(a0)),
            fmt(py(a1 + side)),
            fmt(side * scale),
            fmt(side * scale)
        );
        let count = st.ball_count.to_u64().unwrap_or(u64::MAX);
        if count <= BALL_LOD_CAP {
            let r_ball = st.ball_radius.to_f64().unwrap_or(0.0) * scale;
            let side_u = st.side.to_u64().unwrap_or(0);
            for i in 0..=side_u {
                for j in 0..=side_u {
                    let _ = writeln!(
                        svg,
                        r#"<circle class="ball" cx="{}" cy="{}" r="{}" fill="steelblue"/>"#,
                        fmt(px(a0 + i as f64)),
                        fmt(py(a1 + j as f64)),
                        fmt(r_ball.max(0.4))
                    );
                }
            }
        } else {
            let _ = writeln!(
                svg,
                r#"<rect class="block" x="{}" y="{}" width="{}" height="{}" fill="steelblue" opacity="0.4"><title>stage {n}: {count} balls</title></rect>"#,
                fmt(px(a0)),
                fmt(py(a1 + side)),
                fmt(side * scale),
                fmt(side * scale)
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<desc>Illustrative rendering; all certified quantities live in the manifest.</desc>\n",
        fmt(w),
        fmt(h),
        fmt(w),
        fmt(h)
    )
}
