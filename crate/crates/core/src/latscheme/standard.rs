use super::{mk_affine, restrict_scheme, LatticeScheme, Overlap, OverlapPiece, RestrictedScheme};
use crate::algebra::{make_localization, Field, PresentedAlgebra};
use crate::error::Result;

impl OverlapPiece {
    /// Builds a piece from textual images: `forward` gives the variables of
    /// the right chart in `(A_i)_f`, `inverse` those of the left chart in `(A_j)_g`.
    /// Division by units of the localization is allowed, e.g. `1/t`.
    pub fn parse(
        left: &PresentedAlgebra,
        f: &str,
        right: &PresentedAlgebra,
        g: &str,
        forward: &[&str],
        inverse: &[&str],
    ) -> Result<OverlapPiece> {
        let l = make_localization(left, &left.parse_element(f)?)?;
        let r = make_localization(right, &right.parse_element(g)?)?;
        let fw = forward
            .iter()
            .map(|t| l.algebra().parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        let inv = inverse
            .iter()
            .map(|t| r.algebra().parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        OverlapPiece::from_images(&l, &r, fw, inv)
    }
}

/// `P^1` glued from `k[t]` and `k[s]` along `t ↦ 1/s`.
pub fn projective_line(field: Field) -> Result<LatticeScheme> {
    let a = PresentedAlgebra::free(field, &["t"]);
    let b = PresentedAlgebra::free(field, &["s"]);
    let piece = OverlapPiece::parse(&a, "t", &b, "s", &["1/t"], &["1/s"])?;
    LatticeScheme::glue(
        vec![a, b],
        vec![Overlap {
            left: 0,
            right: 1,
            pieces: vec![piece],
        }],
    )
}

/// `A^2 \ {0}` as `Spec k[x,y]` restricted to `D(x, y)`.
pub fn punctured_plane(field: Field) -> Result<RestrictedScheme> {
    let plane = mk_affine(&PresentedAlgebra::free(field, &["x", "y"]));
    let u = plane.from_chart(0, &crate::zarlattice::ZarElement::parse(plane.chart(0), "D(x, y)")?)?;
    restrict_scheme(&plane, &u)
}

/// Two disjoint affine lines.
pub fn two_lines(field: Field) -> Result<LatticeScheme> {
    LatticeScheme::glue(
        vec![
            PresentedAlgebra::free(field, &["t"]),
            PresentedAlgebra::free(field, &["s"]),
        ],
        Vec::new(),
    )
}

/// `P^2` from three affine planes.
pub fn projective_plane(field: Field) -> Result<LatticeScheme> {
    let a0 = PresentedAlgebra::free(field, &["a", "b"]);
    let a1 = PresentedAlgebra::free(field, &["c", "d"]);
    let a2 = PresentedAlgebra::free(field, &["e", "f"]);
    let p01 = OverlapPiece::parse(&a0, "a", &a1, "c", &["1/a", "b/a"], &["1/c", "d/c"])?;
    let p02 = OverlapPiece::parse(&a0, "b", &a2, "e", &["1/b", "a/b"], &["f/e", "1/e"])?;
    let p12 = OverlapPiece::parse(&a1, "d", &a2, "f", &["c/d", "1/d"], &["e/f", "1/f"])?;
    let ov = |left, right, p| Overlap {
        left,
        right,
        pieces: vec![p],
    };
    LatticeScheme::glue(vec![a0, a1, a2], vec![ov(0, 1, p01), ov(0, 2, p02), ov(1, 2, p12)])
}
