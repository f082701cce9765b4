//! The five-mode Alice–Bob–Eve state for one channel point.

use cvqkd::gaussian::{symplectic_eigenvalues, Quadrature};
use cvqkd::protocol::{
    alice_bob_quadrature_cov, build_global_state, cloner_from_channel, eve_reduced_state,
    model_quadrature_cov, pm_modulation_variance, ChannelParams, ProtocolParams,
};

fn main() -> cvqkd::error::Result<()> {
    let p = ProtocolParams::coherent(1.0)?;
    let ch = ChannelParams::new(0.7, 0.05)?;

    let cloner = cloner_from_channel(&ch)?;
    println!(
        "cloner: r_E = {:.6}, beam splitter T = {}",
        cloner.eve_squeezing, cloner.signal_transmission
    );
    println!(
        "prepare-and-measure modulation variance: {:.6}",
        pm_modulation_variance(&p)
    );

    let global = build_global_state(&p, &ch)?;
    println!(
        "global spectrum: {:?}",
        symplectic_eigenvalues(&global)?.values()
    );

    let closed = alice_bob_quadrature_cov(&p, &ch)?;
    for q in [Quadrature::X, Quadrature::P] {
        let m = model_quadrature_cov(&global, q);
        println!("{q:?}: v_a={:.9} v_b={:.9} c={:+.9}", m.v_a, m.v_b, m.c);
    }
    println!(
        "closed form X: v_a={:.9} v_b={:.9} c={:+.9}",
        closed.v_a, closed.v_b, closed.c
    );

    let eve = eve_reduced_state(&p, &ch)?;
    println!(
        "Eve's spectrum: {:?}",
        symplectic_eigenvalues(&eve)?.values()
    );
    Ok(())
}
