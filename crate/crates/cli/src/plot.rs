//! Static SVG chart for radius sweeps.
//!
//! Weak index against r as a step curve on the left axis, |H| as a
//! smooth curve on the right axis. Self-contained: fixed viewport,
//! numbers formatted to a few digits, no external assets.

use std::fmt::Write;

use cmc_index::closed_spectrum::SweepPoint;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 656.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 372.0;

struct Scale {
    lo: f64,
    hi: f64,
    out_lo: f64,
    out_hi: f64,
}

impl Scale {
    fn map(&self, x: f64) -> f64 {
        let t = if self.hi > self.lo {
            (x - self.lo) / (self.hi - self.lo)
        } else {
            0.5
        };
        self.out_lo + t * (self.out_hi - self.out_lo)
    }
}

pub fn sweep_svg(points: &[SweepPoint]) -> String {
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    if points.is_empty() {
        svg.push_str("<text x=\"360\" y=\"210\" text-anchor=\"middle\">no data</text>\n</svg>\n");
        return svg;
    }

    let r_lo = points.iter().map(|p| p.r).fold(f64::INFINITY, f64::min);
    let r_hi = points.iter().map(|p| p.r).fold(f64::NEG_INFINITY, f64::max);
    let w_hi = points.iter().map(|p| p.weak).max().unwrap_or(0) as f64;
    let h_lo = points.iter().map(|p| p.abs_h).fold(f64::INFINITY, f64::min);
    let h_hi = points
        .iter()
        .map(|p| p.abs_h)
        .fold(f64::NEG_INFINITY, f64::max);

    let x = Scale {
        lo: r_lo,
        hi: r_hi,
        out_lo: LEFT,
        out_hi: RIGHT,
    };
    // y axes point down in SVG, so outputs are swapped
    let yw = Scale {
        lo: 0.0,
        hi: (w_hi + 1.0).max(1.0),
        out_lo: BOTTOM,
        out_hi: TOP,
    };
    let span = (h_hi - h_lo).max(1e-9);
    let yh = Scale {
        lo: h_lo - 0.05 * span,
        hi: h_hi + 0.05 * span,
        out_lo: BOTTOM,
        out_hi: TOP,
    };

    // frame
    let _ = write!(
        svg,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    // x ticks
    let x_ticks = 6.min(points.len());
    for i in 0..x_ticks {
        let t = if x_ticks > 1 {
            i as f64 / (x_ticks - 1) as f64
        } else {
            0.0
        };
        let r = r_lo + t * (r_hi - r_lo);
        let px = x.map(r);
        let _ = write!(
            svg,
            "<line x1=\"{px:.1}\" y1=\"{BOTTOM}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#444\"/>\n\
             <text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{r:.3}</text>\n",
            BOTTOM + 5.0,
            BOTTOM + 20.0
        );
    }

    // left ticks: integers, thinned to at most eight labels
    let stride = ((w_hi + 1.0) / 8.0).ceil().max(1.0) as u64;
    let mut level = 0;
    while (level as f64) <= w_hi + 0.5 {
        let py = yw.map(level as f64);
        let _ = write!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{LEFT}\" y2=\"{py:.1}\" stroke=\"#444\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{level}</text>\n",
            LEFT - 5.0,
            LEFT - 9.0,
            py + 4.0
        );
        level += stride;
    }

    // right ticks: three levels of |H|
    for i in 0..3 {
        let v = h_lo + (h_hi - h_lo) * i as f64 / 2.0;
        let py = yh.map(v);
        let _ = write!(
            svg,
            "<line x1=\"{RIGHT}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#b5651d\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" fill=\"#b5651d\">{v:.3}</text>\n",
            RIGHT + 5.0,
            RIGHT + 9.0,
            py + 4.0
        );
    }

    // weak index as stairs
    let mut path = String::new();
    for (i, p) in points.iter().enumerate() {
        let px = x.map(p.r);
        let py = yw.map(p.weak as f64);
        if i == 0 {
            let _ = write!(path, "M{px:.1} {py:.1}");
        } else {
            let _ = write!(path, " H{px:.1} V{py:.1}");
        }
    }
    let _ = write!(
        svg,
        "<path d=\"{path}\" fill=\"none\" stroke=\"#2166ac\" stroke-width=\"2\"/>\n"
    );

    // |H| as a polyline
    let mut line = String::new();
    for p in points {
        let _ = write!(line, "{:.1},{:.1} ", x.map(p.r), yh.map(p.abs_h));
    }
    let _ = write!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#b5651d\" stroke-width=\"1.5\" \
         stroke-dasharray=\"5 3\"/>\n",
        line.trim_end()
    );

    // labels
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">r</text>\n\
         <text x=\"{LEFT}\" y=\"{:.1}\" fill=\"#2166ac\">weak index</text>\n\
         <text x=\"{RIGHT}\" y=\"{:.1}\" fill=\"#b5651d\" text-anchor=\"end\">|H|</text>\n",
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 8.0,
        TOP - 10.0,
        TOP - 10.0
    );
    svg.push_str("</svg>\n");
    svg
}
