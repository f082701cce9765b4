//! Critical excess noise against transmission, collective bound.

use cvqkd::bounds::{Bound, Direction};
use cvqkd::protocol::ProtocolParams;
use cvqkd::solvers::critical_noise;

fn main() -> cvqkd::error::Result<()> {
    let coherent = ProtocolParams::coherent(15.0)?;
    let squeezed = ProtocolParams::squeezed(15.0)?;
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "T", "coh/dir", "coh/rev", "sq/dir", "sq/rev"
    );
    for t in [0.999, 0.99, 0.9, 0.7, 0.5, 0.3] {
        let mut row = format!("{t:>6}");
        for p in [&coherent, &squeezed] {
            for dir in [Direction::Direct, Direction::Reverse] {
                match critical_noise(Bound::Collective(dir), p, t) {
                    Ok(cp) => row += &format!(" {:>10.6}", cp.value),
                    Err(_) => row += &format!(" {:>10}", "-"),
                }
            }
        }
        println!("{row}");
    }
    Ok(())
}
