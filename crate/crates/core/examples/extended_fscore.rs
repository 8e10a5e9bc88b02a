//! The extended F-score across trade-off factors, including the named
//! inspection scenarios.
//!
//! ```bash
//! cargo run --example extended_fscore
//! cargo run --example extended_fscore -- 0.749 0.838
//! ```

use coveval::f_ext_mu;
use coveval::metrics::Scenario;

fn main() -> coveval::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (xp, xr) = match args[..] {
        [p, r] => (p, r),
        _ => (0.909, 0.879),
    };
    println!("XP = {xp}, XR = {xr}");
    for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let f = f_ext_mu(xp, xr, mu)?;
        let note = if f.extreme_mu { "  (ignores one side)" } else { "" };
        println!("  mu = {mu:<4}  F = {:.4}{note}", f.value);
    }
    println!("scenarios:");
    for s in Scenario::ALL {
        println!("  {:<24} mu = {:<4}  F = {:.4}", s.name(), s.mu(), f_ext_mu(xp, xr, s.mu())?.value);
    }
    Ok(())
}
