// Raw and averaged periodogram of a simulated Gegenbauer series.
use polefinder::prelude::*;

fn main() -> Result<()> {
    let x = simulate(&SimModel::new(SimFamily::GegenbauerHalfPi, 0.6, 512, 1)?)?;
    let grid = periodogram(&x);
    let smooth = averaged_periodogram(&grid, 6)?;
    println!("{:>4} {:>10} {:>12} {:>12}", "l", "lambda", "I", "I_bar");
    for l in (112..=144).step_by(4) {
        println!(
            "{l:>4} {:>10.5} {:>12.5} {:>12.5}",
            fourier_frequency(l as i64, x.len()),
            grid.ordinates()[l],
            smooth.floored()[l]
        );
    }
    println!("folded index of -3 for n = 512: {}", fold_index(-3, 512));
    Ok(())
}
