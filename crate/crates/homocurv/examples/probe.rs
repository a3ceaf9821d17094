use homocurv::{catalog, curvature, metric::DiagonalMetric};

fn main() {
    let space = catalog::so5_stiefel();
    let n = 2.0_f64;
    let g = DiagonalMetric::new(vec![1.0/(4.0*n.powi(4)), 1.0, 1.0, n, 2.0*n, 2.0*n]).unwrap();
    let op = curvature::curvature_operator(&space, &g.to_general(&space));
    println!("symmetry residual: {:.3e}", op.symmetry_residual());
    for (row, &(a, b)) in op.pairs.iter().enumerate() {
        print!("Rm(X{}^X{}) =", a + 1, b + 1);
        for (col, &(c, d)) in op.pairs.iter().enumerate() {
            let v = op.matrix[(row, col)];
            if v.abs() > 1e-12 {
                print!("  {:+.10} X{}^X{}", v, c + 1, d + 1);
            }
        }
        println!();
    }
}
