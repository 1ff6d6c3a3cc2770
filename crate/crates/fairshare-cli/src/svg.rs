//! Hand-rolled static SVG for the region maps: translucent cells per player,
//! the domain outline on top, and a small legend. No dependencies, SVG 1.1.

use fairshare::analysis::{RegionLabel, RegionMap};
use fairshare::Payoff;

const SIZE: f64 = 640.0;
const PAD: f64 = 48.0;
const P1_FILL: &str = "#d1495b";
const P2_FILL: &str = "#2e6fab";

pub fn render(map: &RegionMap, outline: &[Payoff], title: &str) -> String {
    let (lo, hi) = bounds(outline, map);
    let span = (hi.u1 - lo.u1).max(hi.u2 - lo.u2).max(1e-9);
    let scale = (SIZE - 2.0 * PAD) / span;
    let x = |u: f64| PAD + (u - lo.u1) * scale;
    let y = |u: f64| SIZE - PAD - (u - lo.u2) * scale;
    let cell = map.grid_step * scale;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    s.push_str(&format!(
        "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));

    for (player, fill) in [(0, P1_FILL), (1, P2_FILL)] {
        for p in &map.points {
            if p.labels[player] != RegionLabel::Gain {
                continue;
            }
            s.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"{}\" fill-opacity=\"0.45\"/>\n",
                x(p.c.u1) - cell / 2.0,
                y(p.c.u2) - cell / 2.0,
                cell,
                cell,
                fill
            ));
        }
    }

    let pts: Vec<String> =
        outline.iter().map(|v| format!("{:.2},{:.2}", x(v.u1), y(v.u2))).collect();
    s.push_str(&format!(
        "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        pts.join(" ")
    ));

    s.push_str(&format!(
        "<text x=\"{PAD}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n"
    ));
    for (k, (fill, label)) in
        [(P1_FILL, "player 1 gains"), (P2_FILL, "player 2 gains")].iter().enumerate()
    {
        let ty = 50.0 + 22.0 * k as f64;
        s.push_str(&format!(
            "<rect x=\"{PAD}\" y=\"{:.0}\" width=\"14\" height=\"14\" \
             fill=\"{fill}\" fill-opacity=\"0.45\"/>\n",
            ty - 11.0
        ));
        s.push_str(&format!(
            "<text x=\"{:.0}\" y=\"{ty:.0}\" font-family=\"sans-serif\" font-size=\"12\">\
             {label}</text>\n",
            PAD + 20.0
        ));
    }
    for (u, v) in [(lo.u1, lo.u2), (hi.u1, lo.u2), (lo.u1, hi.u2)] {
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" \
             fill=\"#555\">({u:.2}, {v:.2})</text>\n",
            x(u) - 18.0,
            y(v) + 14.0
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(outline: &[Payoff], map: &RegionMap) -> (Payoff, Payoff) {
    let mut lo = Payoff::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Payoff::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in outline.iter().chain(map.points.iter().map(|p| &p.c)) {
        lo = Payoff::new(lo.u1.min(v.u1), lo.u2.min(v.u2));
        hi = Payoff::new(hi.u1.max(v.u1), hi.u2.max(v.u2));
    }
    (lo, hi)
}
