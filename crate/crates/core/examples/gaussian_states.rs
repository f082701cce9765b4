//! Two-mode squeezing, a beam splitter, homodyne conditioning and entropies.

use cvqkd::gaussian::{
    apply, condition_on_quadrature, partial_trace, symplectic_eigenvalues, two_mode_squeezed,
    von_neumann_entropy, QuadratureSelector, SymplecticTransform,
};

fn main() -> cvqkd::error::Result<()> {
    let tmsv = two_mode_squeezed(1.0)?;
    println!("TMSV(r=1) covariance:{}", tmsv.covariance());

    let half = partial_trace(&tmsv, &[0])?;
    println!(
        "reduced spectrum   {:?}",
        symplectic_eigenvalues(&half)?.values()
    );
    println!("reduced entropy    {:.9} nats", von_neumann_entropy(&half)?);

    let bs = SymplecticTransform::beam_splitter(0.5, 0, 1, 2)?;
    let mixed = apply(&bs, &tmsv)?;
    println!(
        "after 50:50 BS     {:?}",
        symplectic_eigenvalues(&mixed)?.values()
    );

    // Measuring X on one half of a pure state leaves the other half pure.
    let cond = condition_on_quadrature(&tmsv, QuadratureSelector::x(1))?;
    println!("conditional cov:{}", cond.covariance());
    println!("conditional entropy {:.3e}", von_neumann_entropy(&cond)?);
    Ok(())
}
