//! Tolerable losses at high modulation.

use cvqkd::bounds::{Bound, Direction};
use cvqkd::error::Error;
use cvqkd::protocol::ProtocolParams;
use cvqkd::solvers::critical_transmission;

fn main() -> cvqkd::error::Result<()> {
    let p = ProtocolParams::coherent(15.0)?;
    for bound in [Bound::GeneralW, Bound::Collective(Direction::Direct)] {
        let cp = critical_transmission(bound, &p, 0.0)?;
        println!(
            "{bound:<18} T_c = {:.6} ({:.4} dB), residual {:.1e}",
            cp.value,
            cp.in_db.unwrap(),
            cp.residual
        );
    }

    for ta in [0.3, 0.5, 0.9] {
        let cp = critical_transmission(
            Bound::Collective(Direction::Direct),
            &p.with_alice_transmittivity(ta)?,
            0.0,
        )?;
        println!("direct, T_A = {ta}: T_c = {:.7}", cp.value);
    }

    // Reverse reconciliation has no loss limit: there is nothing to bracket.
    match critical_transmission(Bound::Collective(Direction::Reverse), &p, 0.0) {
        Err(e @ Error::BracketFailure { .. }) => println!("reverse: {e}"),
        other => println!("reverse: {other:?}"),
    }
    Ok(())
}
