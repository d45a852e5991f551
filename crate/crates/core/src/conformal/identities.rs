//! Exhaustive checks of the conformal identities on concrete triples:
//! sesqui-linearity, conformal associativity, and the four brace identities.
//!
//! Every product needed is read from a full product table, so each identity
//! is checked for all index pairs `(n, m)` up to the largest locality that
//! occurs plus a margin of two.

use serde::Serialize;

use super::{brace_from_table, product_table, table_entry, CendElem, ConformalError};
use crate::arith::{binomial, rat, Rational};

/// Source of `n`-products used by the identity checker.
pub trait ProductTable {
    /// `[a ⊛_0 b, a ⊛_1 b, …]` with trailing zeros removed.
    fn table(&self, a: &CendElem, b: &CendElem) -> Vec<CendElem>;
}

/// The products of `Cend_n`.
pub struct GenuineProducts;

impl ProductTable for GenuineProducts {
    fn table(&self, a: &CendElem, b: &CendElem) -> Vec<CendElem> {
        product_table(a, b).expect("sizes checked by caller")
    }
}

/// Negative control: `⊛_0` replaced by the matrix anticommutator `ab + ba`.
pub struct CorruptedZeroProduct;

impl ProductTable for CorruptedZeroProduct {
    fn table(&self, a: &CendElem, b: &CendElem) -> Vec<CendElem> {
        let mut t = product_table(a, b).expect("sizes checked by caller");
        let anti = &a.matrix_product(b) + &b.matrix_product(a);
        if t.is_empty() {
            t.push(anti);
        } else {
            t[0] = anti;
        }
        while t.last().is_some_and(CendElem::is_zero) {
            t.pop();
        }
        t
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Witness {
    pub n: usize,
    pub m: Option<usize>,
    pub lhs: CendElem,
    pub rhs: CendElem,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct IdentityCheck {
    pub identity: String,
    pub passed: bool,
    pub cases: usize,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, identity: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.identity == identity)
    }
}

/// A product table together with its brace products, both indexed by `n`.
struct Tab {
    prods: Vec<CendElem>,
    braces: Vec<CendElem>,
}

impl Tab {
    fn new(prods: Vec<CendElem>, size: usize) -> Self {
        let braces = (0..prods.len())
            .map(|k| brace_from_table(&prods, k, size))
            .collect();
        Tab { prods, braces }
    }

    fn len(&self) -> usize {
        self.prods.len()
    }
}

struct Ctx<'a, T: ProductTable> {
    products: &'a T,
    size: usize,
}

impl<T: ProductTable> Ctx<'_, T> {
    fn tab(&self, a: &CendElem, b: &CendElem) -> Tab {
        Tab::new(self.products.table(a, b), self.size)
    }

    fn p(&self, t: &Tab, n: usize) -> CendElem {
        table_entry(&t.prods, n, self.size)
    }

    fn br(&self, t: &Tab, n: usize) -> CendElem {
        table_entry(&t.braces, n, self.size)
    }

    fn zero(&self) -> CendElem {
        CendElem::zero(self.size)
    }
}

fn pick<'t>(v: &'t [Tab], k: usize, empty: &'t Tab) -> &'t Tab {
    v.get(k).unwrap_or(empty)
}

fn signed_binomial(n: usize, s: usize) -> Rational {
    let b = binomial(n, s);
    if s % 2 == 1 {
        -b
    } else {
        b
    }
}

struct Recorder {
    check: IdentityCheck,
}

impl Recorder {
    fn new(identity: &str) -> Self {
        Recorder {
            check: IdentityCheck {
                identity: identity.to_string(),
                passed: true,
                cases: 0,
                witness: None,
            },
        }
    }

    fn record(&mut self, n: usize, m: Option<usize>, lhs: CendElem, rhs: CendElem) {
        self.check.cases += 1;
        if lhs != rhs && self.check.witness.is_none() {
            self.check.passed = false;
            self.check.witness = Some(Witness { n, m, lhs, rhs });
        }
    }
}

/// Runs every identity check with the genuine `Cend_n` products.
pub fn check_conformal_identities(
    a: &CendElem,
    b: &CendElem,
    c: &CendElem,
) -> Result<IdentityReport, ConformalError> {
    check_identities_with(&GenuineProducts, a, b, c)
}

/// Runs every identity check using `products` as the product table.
pub fn check_identities_with<T: ProductTable>(
    products: &T,
    a: &CendElem,
    b: &CendElem,
    c: &CendElem,
) -> Result<IdentityReport, ConformalError> {
    a.check_sizes(b)?;
    b.check_sizes(c)?;
    let cx = Ctx {
        products,
        size: a.size(),
    };
    let mut checks = Vec::new();
    checks.extend(sesqui_checks(&cx, a, b));
    checks.extend(sesqui_checks(&cx, b, c));

    let ab = cx.tab(a, b);
    let bc = cx.tab(b, c);
    let first = ab.len().max(bc.len()) + 2;
    // (a ⊛_n b) ⊛ c, a ⊛ (b ⊛_k c), a ⊛ {b ⊛_k c}, {a ⊛_k b} ⊛ c
    let ab_c: Vec<Tab> = (0..first).map(|k| cx.tab(&cx.p(&ab, k), c)).collect();
    let a_bc: Vec<Tab> = (0..first).map(|k| cx.tab(a, &cx.p(&bc, k))).collect();
    let a_brbc: Vec<Tab> = (0..first).map(|k| cx.tab(a, &cx.br(&bc, k))).collect();
    let brab_c: Vec<Tab> = (0..first).map(|k| cx.tab(&cx.br(&ab, k), c)).collect();
    let widest = [&ab_c, &a_bc, &a_brbc, &brab_c]
        .iter()
        .flat_map(|v| v.iter().map(Tab::len))
        .max()
        .unwrap_or(0);
    let range = widest.max(first) + 2;
    let empty = Tab {
        prods: Vec::new(),
        braces: Vec::new(),
    };

    let mut assoc = Recorder::new("conformal associativity (a⊛_n b)⊛_m c");
    let mut b9 = Recorder::new("brace 1: a⊛_n{b⊛_m c} = {(a⊛_n b)⊛_m c}");
    let mut b10 = Recorder::new("brace 2: {a⊛_n(b⊛_m c)}");
    let mut b11 = Recorder::new("brace 3: {a⊛_n{b⊛_m c}}");
    let mut b12 = Recorder::new("brace 4: {a⊛_n b}⊛_m c");

    for n in 0..range {
        for m in 0..range {
            // (a ⊛_n b) ⊛_m c = Σ_s (-1)^s C(n,s) a ⊛_(n-s) (b ⊛_(m+s) c)
            let lhs = cx.p(pick(&ab_c, n, &empty), m);
            let mut rhs = cx.zero();
            for s in 0..=n {
                let t = cx.p(pick(&a_bc, m + s, &empty), n - s);
                if !t.is_zero() {
                    rhs = &rhs + &t.scale(&signed_binomial(n, s));
                }
            }
            assoc.record(n, Some(m), lhs, rhs);

            // a ⊛_n {b ⊛_m c} = {(a ⊛_n b) ⊛_m c}
            b9.record(n, Some(m), cx.p(pick(&a_brbc, m, &empty), n), cx.br(pick(&ab_c, n, &empty), m));

            // {a ⊛_n (b ⊛_m c)} = Σ_s (-1)^s C(m,s) {{a ⊛_(m-s) b} ⊛_(n+s) c}
            let lhs = cx.br(pick(&a_bc, m, &empty), n);
            let mut rhs = cx.zero();
            for s in 0..=m {
                let t = cx.br(pick(&brab_c, m - s, &empty), n + s);
                if !t.is_zero() {
                    rhs = &rhs + &t.scale(&signed_binomial(m, s));
                }
            }
            b10.record(n, Some(m), lhs, rhs);

            // {a ⊛_n {b ⊛_m c}} = Σ_s (-1)^s C(m,s) {{a ⊛_(n+s) b} ⊛_(m-s) c}
            let lhs = cx.br(pick(&a_brbc, m, &empty), n);
            let mut rhs = cx.zero();
            for s in 0..=m {
                let t = cx.br(pick(&brab_c, n + s, &empty), m - s);
                if !t.is_zero() {
                    rhs = &rhs + &t.scale(&signed_binomial(m, s));
                }
            }
            b11.record(n, Some(m), lhs, rhs);

            // {a ⊛_n b} ⊛_m c = Σ_s (-1)^s C(n,s) a ⊛_(m+s) (b ⊛_(n-s) c)
            let lhs = cx.p(pick(&brab_c, n, &empty), m);
            let mut rhs = cx.zero();
            for s in 0..=n {
                let t = cx.p(pick(&a_bc, n - s, &empty), m + s);
                if !t.is_zero() {
                    rhs = &rhs + &t.scale(&signed_binomial(n, s));
                }
            }
            b12.record(n, Some(m), lhs, rhs);
        }
    }
    checks.extend([assoc, b9, b10, b11, b12].map(|r| r.check));
    Ok(IdentityReport { checks })
}

/// Sesqui-linearity in both slots, for products and for brace products.
fn sesqui_checks<T: ProductTable>(cx: &Ctx<'_, T>, a: &CendElem, b: &CendElem) -> Vec<IdentityCheck> {
    let ab = cx.tab(a, b);
    let da_b = cx.tab(&a.d_action(), b);
    let a_db = cx.tab(a, &b.d_action());
    let range = ab.len().max(da_b.len()).max(a_db.len()) + 2;
    let mut left = Recorder::new("sesqui-linearity: Da⊛_n b = -n a⊛_(n-1) b");
    let mut right = Recorder::new("sesqui-linearity: a⊛_n Db = D(a⊛_n b) + n a⊛_(n-1) b");
    let mut brace_right = Recorder::new("brace sesqui-linearity: {a⊛_n Db} = -n{a⊛_(n-1) b}");
    let mut brace_left =
        Recorder::new("brace sesqui-linearity: {Da⊛_n b} = D{a⊛_n b} + n{a⊛_(n-1) b}");
    for n in 0..range {
        let prev = |f: &dyn Fn(&Tab, usize) -> CendElem| {
            if n == 0 {
                cx.zero()
            } else {
                f(&ab, n - 1).scale(&rat(n as i64))
            }
        };
        let p_prev = prev(&|t, k| cx.p(t, k));
        let b_prev = prev(&|t, k| cx.br(t, k));
        left.record(n, None, cx.p(&da_b, n), -&p_prev);
        right.record(n, None, cx.p(&a_db, n), &cx.p(&ab, n).d_action() + &p_prev);
        brace_right.record(n, None, cx.br(&a_db, n), -&b_prev);
        brace_left.record(n, None, cx.br(&da_b, n), &cx.br(&ab, n).d_action() + &b_prev);
    }
    vec![left.check, right.check, brace_right.check, brace_left.check]
}
