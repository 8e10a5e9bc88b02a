//! Deterministic and random fractal curves: node indexing by topological
//! order, sub-curves, and box-counting dimension.
//!
//! ```bash
//! cargo run --example fractal_curve
//! ```

use coveval::fractal::{
    dyadic_scales, estimate_fractal_dimension, extract_subcurve, generate_curve, Point, TransformParams,
};

fn main() -> coveval::Result<()> {
    let (a, b) = (Point::new(0.0, 0.0), Point::new(1.0, 0.0));

    let koch = TransformParams::deterministic(1, 0.5, 3f64.sqrt() / 6.0)?;
    let small = generate_curve(&koch, 2, 0, a, b)?;
    println!("depth-2 curve, G = 1:");
    for p in &small.points {
        println!("  n={} k={} T={:<5} ({:.3}, {:.3})", p.n, p.k, p.t_order, p.x, p.y);
    }

    let deep = generate_curve(&koch, 8, 0, a, b)?;
    let d = estimate_fractal_dimension(&deep, &dyadic_scales(&deep, 1.0, 6.0, 6))?;
    println!("deterministic, depth 8: {} points, dimension {d:.4}", deep.len());

    let random = TransformParams::random(1, (0.35, 0.65), (-0.25, 0.25))?;
    for seed in 0..3 {
        let c = generate_curve(&random, 8, seed, a, b)?;
        let left = extract_subcurve(&c, 0.0, 0.5)?;
        let right = extract_subcurve(&c, 0.5, 1.0)?;
        let dim = |c| estimate_fractal_dimension(c, &dyadic_scales(c, 1.0, 5.0, 5));
        println!(
            "random seed {seed}: whole {:.4}, left half {:.4}, right half {:.4}",
            dim(&c)?,
            dim(&left)?,
            dim(&right)?
        );
    }
    Ok(())
}
