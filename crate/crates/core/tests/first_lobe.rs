//! The first Bessel lobe against the best readout found in `[0, 4000/J]`:
//! `|f(t_asym)| ≥ 0.8 · max_t |f|` for chain lengths between 50 and 500.

use std::io::Write;

use spinlink::optimizer::optimize_line;
use spinlink::{asymptotic_readout_time, line_amplitude, LineSpec, SearchConfig};

#[test]
fn first_lobe_is_near_optimal() {
    let mut low = Vec::new();
    let mut out = std::io::stdout().lock();
    for n in [50usize, 80, 100, 120, 150, 180, 200, 300, 400, 500] {
        let t = asymptotic_readout_time(n as u64, 1.0);
        let lobe = line_amplitude(&LineSpec::new(n, 1.0, 0.0), t).unwrap().abs();
        let best = optimize_line(&LineSpec::new(n, 1.0, 0.0), &SearchConfig::default()).unwrap().search.global;
        let ratio = lobe / best.value;
        let _ = writeln!(
            out,
            "first lobe N={n}: |f(t_asym)|={lobe:.4}, best {:.4} at t={:.1}, ratio {ratio:.3}",
            best.value, best.t
        );
        if ratio < 0.8 {
            low.push(format!("N={n} ({ratio:.3})"));
        }
    }
    assert!(low.is_empty(), "ratio below 0.8 for {}", low.join(", "));
}
