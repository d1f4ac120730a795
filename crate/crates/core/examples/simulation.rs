// Exact Gaussian draws and their sample autocorrelations.
use polefinder::prelude::*;

fn main() -> Result<()> {
    let n = 4096;
    for family in [SimFamily::FarimaZeroPole, SimFamily::GegenbauerHalfPi] {
        let rho = family.autocorrelations(0.4, 4)?;
        let x = simulate(&SimModel::new(family, 0.4, n, 9)?)?;
        let v = x.values();
        let mean = v.iter().sum::<f64>() / n as f64;
        let acov = |h: usize| (0..n - h).map(|t| (v[t] - mean) * (v[t + h] - mean)).sum::<f64>() / n as f64;
        let g0 = acov(0);
        print!("{:<12}", family.name());
        for h in 1..=4 {
            print!(" lag {h}: {:+.3} ({:+.3})", acov(h) / g0, rho.rho()[h]);
        }
        println!();
    }
    Ok(())
}
