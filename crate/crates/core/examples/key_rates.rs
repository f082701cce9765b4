//! Key rates of every bound at one channel point, in nats and bits.

use cvqkd::bounds::{key_rate, Bound, Direction, LogBase};
use cvqkd::protocol::{ChannelParams, ProtocolParams};

fn main() -> cvqkd::error::Result<()> {
    let ch = ChannelParams::new(0.8, 0.02)?;
    let bounds = [
        Bound::General,
        Bound::GeneralW,
        Bound::Collective(Direction::Direct),
        Bound::Collective(Direction::Reverse),
    ];
    for p in [
        ProtocolParams::coherent(1.5)?,
        ProtocolParams::squeezed(1.5)?,
    ] {
        for bound in bounds {
            if bound.check(&p).is_err() {
                continue;
            }
            let r = key_rate(bound, &p, &ch)?;
            println!(
                "{:<9} {:<18} I_AB={:.6} eve={:.6} K={:+.6} nats ({:+.6} bits)",
                p.kind().as_str(),
                bound.to_string(),
                r.i_ab,
                r.eve_term,
                r.key_rate,
                r.in_base(LogBase::Bits).key_rate
            );
        }
    }
    Ok(())
}
