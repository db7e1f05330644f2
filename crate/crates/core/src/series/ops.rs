use std::ops::{Add, Mul, Neg, Sub};

use super::Jet;

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert_eq!(self.nvars, rhs.nvars, "jet variable count mismatch");
        let t = self.truncation.min(rhs.truncation);
        let mut out = self.truncate_to(t);
        for (e, c) in &rhs.coeffs {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        assert_eq!(self.nvars, rhs.nvars, "jet variable count mismatch");
        let t = self.truncation.min(rhs.truncation);
        let mut out = self.truncate_to(t);
        for (e, c) in &rhs.coeffs {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            nvars: self.nvars,
            truncation: self.truncation,
            coeffs: self.coeffs.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

/// Product of two jets. If `f = x^a·u` and `g = x^b·v` are known through
/// degrees `T_f`, `T_g`, the product is known through
/// `min(T_f + ord g, T_g + ord f)`; we keep the simpler `min(T_f, T_g)` so
/// truncation only depends on the operands' truncations.
impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.nvars, rhs.nvars, "jet variable count mismatch");
        let t = self.truncation.min(rhs.truncation);
        let mut out = Jet::zero(self.nvars, t);
        for (ea, ca) in &self.coeffs {
            let da = ea.degree();
            if da > t {
                continue;
            }
            for (eb, cb) in &rhs.coeffs {
                if da + eb.degree() > t {
                    continue;
                }
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}
