//! One row per support coset.

use serde::{Deserialize, Serialize};
use siegel_core::support::{
    al_partner, closed_count, enumerate_support, enumerate_type, ContributionKind, CosetType,
};

use crate::output::CheckOut;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRow {
    pub coset: String,
    pub ctype: String,
    pub i: i64,
    pub j: i64,
    pub r: Option<i64>,
    pub k: Option<i64>,
    pub uclass: Option<u8>,
    pub r_g: String,
    pub dim_contribution: u32,
    pub al_partner: String,
    pub self_paired: bool,
    pub al_contribution: Option<String>,
}

pub fn run(q: u32, n: u32) -> (Vec<SupportRow>, Vec<CheckOut>) {
    let support = enumerate_support(q, n);
    let rows: Vec<SupportRow> = support
        .iter()
        .map(|c| {
            let partner = al_partner(c, n);
            let fixed = partner == *c;
            SupportRow {
                coset: c.to_string(),
                ctype: c.ctype.to_string(),
                i: c.i,
                j: c.j,
                r: c.r,
                k: c.k,
                uclass: c.uclass,
                r_g: format!("{:?}", c.r_kind()),
                dim_contribution: c.table_dim(q),
                al_partner: partner.to_string(),
                self_paired: fixed,
                al_contribution: fixed.then(|| match c.ctype.al_kind() {
                    ContributionKind::Plain => "plain".to_string(),
                    ContributionKind::Twisted => "twisted".to_string(),
                }),
            }
        })
        .collect();
    let mut checks = Vec::new();
    for t in CosetType::ALL {
        let got = enumerate_type(t, q, n).len() as u64;
        let want = closed_count(t, q, n);
        checks.push(CheckOut {
            name: format!("q={q} n={n} type {t} count"),
            passed: got == want,
            informational: false,
            detail: format!("enumerated {got}, closed form {want}"),
        });
    }
    let stray: Vec<String> = support
        .iter()
        .filter(|c| {
            let p = al_partner(c, n);
            !support.contains(&p) || al_partner(&p, n) != **c
        })
        .map(|c| c.to_string())
        .collect();
    checks.push(CheckOut {
        name: format!("q={q} n={n} Atkin-Lehner map is an involution of the support"),
        passed: stray.is_empty(),
        informational: false,
        detail: stray.join(" "),
    });
    (rows, checks)
}
