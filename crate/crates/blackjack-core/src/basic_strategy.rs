//! Basic-strategy charts (hard totals, soft totals, splittable hands) for
//! the S17 and H17 dealer rules, chart lookup with legality degradation,
//! and chart-against-chart agreement.
//!
//! Chart data ships as CSV files so cells can be corrected without touching
//! code; the two standard variants are embedded at build time and parsed on
//! first use. Learned charts emitted by the learners use the same format,
//! with unreached cells simply absent.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use crate::rules::{Action, ActionSet, HandValue};
use crate::shoe::{Card, Rank};
use crate::Error;

const S17_CSV: &str = include_str!("../data/basic_strategy_s17.csv");
const H17_CSV: &str = include_str!("../data/basic_strategy_h17.csv");

pub const DEALER_UP_MIN: u32 = 2;
pub const DEALER_UP_MAX: u32 = 11;
const NUM_UPS: usize = 10;
const HARD_MIN: u32 = 4;
const HARD_ROWS: usize = 18; // totals 4..=21
const SOFT_MIN: u32 = 12;
const SOFT_ROWS: usize = 10; // totals 12..=21; the encoded charts start at 13
const PAIR_ROWS: usize = 10; // ranks A,2..10 by low card value

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartVariant {
    S17,
    H17,
}

impl ChartVariant {
    pub fn name(self) -> &'static str {
        match self {
            ChartVariant::S17 => "s17",
            ChartVariant::H17 => "h17",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "s17" => Ok(ChartVariant::S17),
            "h17" => Ok(ChartVariant::H17),
            other => Err(Error::Parse(format!("unknown chart variant `{other}`"))),
        }
    }

    pub fn for_rules(dealer_hits_soft17: bool) -> Self {
        if dealer_hits_soft17 {
            ChartVariant::H17
        } else {
            ChartVariant::S17
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Hard,
    Soft,
    Pair,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Hard => "hard",
            TableKind::Soft => "soft",
            TableKind::Pair => "pair",
        }
    }

    fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "hard" => Ok(TableKind::Hard),
            "soft" => Ok(TableKind::Soft),
            "pair" => Ok(TableKind::Pair),
            other => Err(Error::Parse(format!("unknown table kind `{other}`"))),
        }
    }
}

/// One chart cell: the prescribed action plus an optional fallback for when
/// the primary is illegal (for example "double, else hit").
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub primary: Action,
    pub fallback: Option<Action>,
}

#[derive(Clone, Debug)]
pub struct StrategyChart {
    variant: ChartVariant,
    hard: [[Option<Cell>; NUM_UPS]; HARD_ROWS],
    soft: [[Option<Cell>; NUM_UPS]; SOFT_ROWS],
    pairs: [[Option<Cell>; NUM_UPS]; PAIR_ROWS],
}

fn up_index(up: u32) -> Result<usize, Error> {
    if !(DEALER_UP_MIN..=DEALER_UP_MAX).contains(&up) {
        return Err(Error::InvalidInput(format!("dealer up card {up}")));
    }
    Ok((up - DEALER_UP_MIN) as usize)
}

/// Dealer up value for chart columns: the ace column is indexed as 11.
pub fn dealer_up_value(card: Card) -> u32 {
    if card.is_ace() {
        11
    } else {
        card.value()
    }
}

/// Pair rows are keyed by the rank's low card value: A -> 1, ten-values -> 10.
pub fn pair_row_value(rank: Rank) -> u32 {
    rank.value()
}

impl StrategyChart {
    pub fn new_empty(variant: ChartVariant) -> Self {
        StrategyChart {
            variant,
            hard: [[None; NUM_UPS]; HARD_ROWS],
            soft: [[None; NUM_UPS]; SOFT_ROWS],
            pairs: [[None; NUM_UPS]; PAIR_ROWS],
        }
    }

    pub fn variant(&self) -> ChartVariant {
        self.variant
    }

    fn row_index(kind: TableKind, row: u32) -> Result<usize, Error> {
        let idx = match kind {
            TableKind::Hard => {
                if !(HARD_MIN..=21).contains(&row) {
                    return Err(Error::InvalidInput(format!("hard total {row}")));
                }
                (row - HARD_MIN) as usize
            }
            TableKind::Soft => {
                if !(SOFT_MIN..=21).contains(&row) {
                    return Err(Error::InvalidInput(format!("soft total {row}")));
                }
                (row - SOFT_MIN) as usize
            }
            TableKind::Pair => {
                if !(1..=10).contains(&row) {
                    return Err(Error::InvalidInput(format!("pair value {row}")));
                }
                (row - 1) as usize
            }
        };
        Ok(idx)
    }

    pub fn set_cell(
        &mut self,
        kind: TableKind,
        row: u32,
        up: u32,
        cell: Cell,
    ) -> Result<(), Error> {
        let r = Self::row_index(kind, row)?;
        let u = up_index(up)?;
        let table = match kind {
            TableKind::Hard => &mut self.hard[r][u],
            TableKind::Soft => &mut self.soft[r][u],
            TableKind::Pair => &mut self.pairs[r][u],
        };
        *table = Some(cell);
        Ok(())
    }

    pub fn cell(&self, kind: TableKind, row: u32, up: u32) -> Result<Option<Cell>, Error> {
        let r = Self::row_index(kind, row)?;
        let u = up_index(up)?;
        Ok(match kind {
            TableKind::Hard => self.hard[r][u],
            TableKind::Soft => self.soft[r][u],
            TableKind::Pair => self.pairs[r][u],
        })
    }

    /// Iterates every defined cell as `(kind, row, up, cell)`.
    pub fn cells(&self) -> impl Iterator<Item = (TableKind, u32, u32, Cell)> + '_ {
        let hard = self.hard.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().filter_map(move |(u, c)| {
                c.map(|c| (TableKind::Hard, HARD_MIN + r as u32, 2 + u as u32, c))
            })
        });
        let soft = self.soft.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().filter_map(move |(u, c)| {
                c.map(|c| (TableKind::Soft, SOFT_MIN + r as u32, 2 + u as u32, c))
            })
        });
        let pairs = self.pairs.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().filter_map(move |(u, c)| {
                c.map(|c| (TableKind::Pair, 1 + r as u32, 2 + u as u32, c))
            })
        });
        hard.chain(soft).chain(pairs)
    }

    pub fn defined_cells(&self) -> usize {
        self.cells().count()
    }

    /// Looks up the prescribed action for a hand.
    ///
    /// Returns the cell's primary action when legal, else its fallback, else
    /// degrades: a pair whose split is unavailable is replayed through the
    /// hard/soft tables by total, an unavailable double or surrender becomes
    /// a hit. The returned action is always in the legal set.
    pub fn lookup(
        &self,
        hv: HandValue,
        pair_rank: Option<Rank>,
        dealer_up: Card,
        legal: ActionSet,
    ) -> Result<Action, Error> {
        if hv.is_bust {
            return Err(Error::InvalidState("chart lookup on a bust hand".into()));
        }
        if legal.is_empty() {
            return Err(Error::InvalidState(
                "chart lookup with no legal actions".into(),
            ));
        }
        let up = up_index(dealer_up_value(dealer_up))?;

        let mut candidates: Vec<Action> = Vec::with_capacity(4);
        if hv.is_pair {
            if let Some(rank) = pair_rank {
                let row = Self::row_index(TableKind::Pair, pair_row_value(rank))?;
                if let Some(cell) = self.pairs[row][up] {
                    candidates.push(cell.primary);
                    if let Some(f) = cell.fallback {
                        candidates.push(f);
                    }
                }
            }
        }
        // By-total cell: also the degradation target for unavailable splits.
        let total_cell = if hv.is_soft {
            if hv.total >= SOFT_MIN {
                self.soft[Self::row_index(TableKind::Soft, hv.total)?][up]
            } else {
                None
            }
        } else {
            self.hard[Self::row_index(TableKind::Hard, hv.total)?][up]
        };
        if let Some(cell) = total_cell {
            candidates.push(cell.primary);
            if let Some(f) = cell.fallback {
                candidates.push(f);
            }
        }
        for action in &candidates {
            if legal.contains(*action) {
                return Ok(*action);
            }
        }
        // Last resort: double/surrender/split all degrade to hit; soft 12
        // and unreached learned-chart cells hit below 17, stand otherwise.
        let prefer_hit = candidates
            .first()
            .map(|a| *a != Action::Stand)
            .unwrap_or(hv.total < 17);
        let order = if prefer_hit {
            [Action::Hit, Action::Stand]
        } else {
            [Action::Stand, Action::Hit]
        };
        for action in order {
            if legal.contains(action) {
                return Ok(action);
            }
        }
        Ok(legal.iter().next().expect("legal set checked non-empty"))
    }

    /// Serializes in the chart CSV format
    /// `table_kind,row_key,dealer_up,primary_action,fallback_action`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("table_kind,row_key,dealer_up,primary_action,fallback_action\n");
        for (kind, row, up, cell) in self.cells() {
            let row_key = match kind {
                TableKind::Pair if row == 1 => "A".to_string(),
                _ => row.to_string(),
            };
            let fallback = cell.fallback.map(|a| a.name()).unwrap_or("");
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                kind.name(),
                row_key,
                up,
                cell.primary.name(),
                fallback
            );
        }
        out
    }

    /// Parses the chart CSV format.
    pub fn parse_csv(text: &str, variant: ChartVariant) -> Result<Self, Error> {
        let mut chart = StrategyChart::new_empty(variant);
        let mut lines = text.lines();
        match lines.next() {
            Some(header)
                if header.trim()
                    == "table_kind,row_key,dealer_up,primary_action,fallback_action" => {}
            other => {
                return Err(Error::Parse(format!(
                    "bad chart header: {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!(
                    "chart line {}: expected 5 fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let kind = TableKind::parse(fields[0])?;
            let row: u32 = if kind == TableKind::Pair && fields[1] == "A" {
                1
            } else {
                fields[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad row key `{}`", fields[1])))?
            };
            let up: u32 = fields[2]
                .parse()
                .map_err(|_| Error::Parse(format!("bad dealer up `{}`", fields[2])))?;
            let primary = Action::parse(fields[3])?;
            let fallback = if fields[4].is_empty() {
                None
            } else {
                Some(Action::parse(fields[4])?)
            };
            chart.set_cell(kind, row, up, Cell { primary, fallback })?;
        }
        Ok(chart)
    }

    pub fn load(path: &Path, variant: ChartVariant) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        StrategyChart::parse_csv(&text, variant)
    }
}

/// Returns the encoded chart for a dealer-rule variant.
pub fn chart(variant: ChartVariant) -> &'static StrategyChart {
    static S17: OnceLock<StrategyChart> = OnceLock::new();
    static H17: OnceLock<StrategyChart> = OnceLock::new();
    match variant {
        ChartVariant::S17 => S17.get_or_init(|| {
            StrategyChart::parse_csv(S17_CSV, ChartVariant::S17).expect("embedded s17 chart")
        }),
        ChartVariant::H17 => H17.get_or_init(|| {
            StrategyChart::parse_csv(H17_CSV, ChartVariant::H17).expect("embedded h17 chart")
        }),
    }
}

/// Agreement between two charts over the cells defined in both.
#[derive(Clone, Copy, Debug)]
pub struct ChartAgreement {
    pub matched_cells: usize,
    pub total_cells: usize,
    pub agreement_pct: f64,
    /// Cells defined in exactly one chart (unreached states, domain gaps);
    /// excluded from the agreement denominator and reported separately.
    pub skipped_cells: usize,
}

/// Counts exact primary-action matches over all cells of the three
/// sub-tables, restricted to cells defined in both charts.
pub fn compare_charts(a: &StrategyChart, b: &StrategyChart) -> Result<ChartAgreement, Error> {
    let mut matched = 0usize;
    let mut total = 0usize;
    let mut skipped = 0usize;
    let tables = [
        (TableKind::Hard, HARD_MIN, HARD_ROWS as u32),
        (TableKind::Soft, SOFT_MIN, SOFT_ROWS as u32),
        (TableKind::Pair, 1, PAIR_ROWS as u32),
    ];
    for (kind, min_row, rows) in tables {
        for row in min_row..min_row + rows {
            for up in DEALER_UP_MIN..=DEALER_UP_MAX {
                match (a.cell(kind, row, up)?, b.cell(kind, row, up)?) {
                    (Some(ca), Some(cb)) => {
                        total += 1;
                        if ca.primary == cb.primary {
                            matched += 1;
                        }
                    }
                    (None, None) => {}
                    _ => skipped += 1,
                }
            }
        }
    }
    if total == 0 {
        return Err(Error::InvalidComparison(
            "charts share no defined cells".into(),
        ));
    }
    Ok(ChartAgreement {
        matched_cells: matched,
        total_cells: total,
        agreement_pct: 100.0 * matched as f64 / total as f64,
        skipped_cells: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{hand_value, legal_actions, RulesConfig};
    use crate::shoe::Rank::*;

    fn hv(ranks: &[Rank]) -> HandValue {
        hand_value(&ranks.iter().map(|&r| Card::new(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn embedded_charts_are_fully_populated() {
        for variant in [ChartVariant::S17, ChartVariant::H17] {
            let c = chart(variant);
            // 18 hard rows + 9 soft rows (13..21) + 10 pair rows, 10 columns.
            assert_eq!(c.defined_cells(), (18 + 9 + 10) * 10);
        }
    }

    #[test]
    fn lookup_examples() {
        let c = chart(ChartVariant::S17);
        let rules = RulesConfig::default();
        let pair8 = hv(&[Eight, Eight]);
        let legal =
            legal_actions(&[Card::new(Eight), Card::new(Eight)], &rules, false, true).unwrap();
        assert_eq!(
            c.lookup(pair8, Some(Eight), Card::new(Ten), legal).unwrap(),
            Action::Split
        );

        // Hard 17 stands in every column.
        let h17 = hv(&[Ten, Seven]);
        for up in [Two, Five, Nine, Ten, Ace] {
            let a = c
                .lookup(h17, None, Card::new(up), ActionSet::all())
                .unwrap();
            assert_eq!(a, Action::Stand, "up {up:?}");
        }

        // Pair of 8s vs 10 with split unavailable degrades through the hard
        // 16 row (surrender, else hit) -- and to hit when surrender is
        // unavailable too.
        let no_split = ActionSet::of(&[Action::Hit, Action::Stand, Action::Double]);
        assert_eq!(
            c.lookup(pair8, Some(Eight), Card::new(Ten), no_split)
                .unwrap(),
            Action::Hit
        );
        let with_surrender = ActionSet::of(&[
            Action::Hit,
            Action::Stand,
            Action::Double,
            Action::Surrender,
        ]);
        assert_eq!(
            c.lookup(pair8, Some(Eight), Card::new(Ten), with_surrender)
                .unwrap(),
            Action::Surrender
        );
    }

    #[test]
    fn chart_cell_examples() {
        let s17 = chart(ChartVariant::S17);
        let cell = s17.cell(TableKind::Hard, 11, 6).unwrap().unwrap();
        assert_eq!(cell.primary, Action::Double);
        for up in DEALER_UP_MIN..=DEALER_UP_MAX {
            let cell = s17.cell(TableKind::Pair, 1, up).unwrap().unwrap();
            assert_eq!(cell.primary, Action::Split, "aces vs {up}");
        }
    }

    #[test]
    fn s17_h17_differ_in_known_cells() {
        let s17 = chart(ChartVariant::S17);
        let h17 = chart(ChartVariant::H17);
        let mut diffs = Vec::new();
        for (kind, row, up, cell) in s17.cells() {
            let other = h17.cell(kind, row, up).unwrap().unwrap();
            if cell.primary != other.primary {
                diffs.push((kind, row, up));
            }
        }
        diffs.sort_by_key(|(k, r, u)| (k.name(), *r, *u));
        assert_eq!(
            diffs,
            vec![
                (TableKind::Hard, 11, 11),
                (TableKind::Hard, 15, 11),
                (TableKind::Hard, 17, 11),
                (TableKind::Pair, 8, 11),
                (TableKind::Soft, 18, 2),
                (TableKind::Soft, 19, 6),
            ]
        );
    }

    #[test]
    fn soft_12_degrades_to_hit() {
        // A pair of aces with split unavailable has no soft-12 chart row;
        // the lookup hits.
        let c = chart(ChartVariant::S17);
        let aces = hv(&[Ace, Ace]);
        let no_split = ActionSet::of(&[Action::Hit, Action::Stand, Action::Double]);
        assert_eq!(
            c.lookup(aces, Some(Ace), Card::new(Six), no_split).unwrap(),
            Action::Hit
        );
    }

    #[test]
    fn lookup_rejects_bust() {
        let c = chart(ChartVariant::S17);
        let bust = hv(&[Ten, Nine, Five]);
        assert!(matches!(
            c.lookup(bust, None, Card::new(Two), ActionSet::all()),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn lookup_total_over_reachable_states() {
        // Every non-bust (hand, up) pair resolves to a legal action.
        let c = chart(ChartVariant::H17);
        let rules = RulesConfig::default();
        let values = [
            Ace, Two, Three, Four, Five, Six, Seven, Eight, Nine, Ten, King,
        ];
        for &a in &values {
            for &b in &values {
                for &up in &values {
                    for already_split in [false, true] {
                        let cards = [Card::new(a), Card::new(b)];
                        let h = hand_value(&cards).unwrap();
                        let legal = legal_actions(&cards, &rules, already_split, true).unwrap();
                        let action = c
                            .lookup(h, h.is_pair.then_some(a), Card::new(up), legal)
                            .unwrap();
                        assert!(legal.contains(action));
                    }
                }
            }
        }
    }

    #[test]
    fn compare_identity_and_flip() {
        let c = chart(ChartVariant::S17);
        let agreement = compare_charts(c, c).unwrap();
        assert_eq!(agreement.agreement_pct, 100.0);
        assert_eq!(agreement.total_cells, 370);
        assert_eq!(agreement.skipped_cells, 0);

        let mut flipped = c.clone();
        flipped
            .set_cell(
                TableKind::Hard,
                12,
                4,
                Cell {
                    primary: Action::Hit,
                    fallback: None,
                },
            )
            .unwrap();
        let agreement = compare_charts(c, &flipped).unwrap();
        assert_eq!(agreement.matched_cells, 369);
        let expected = 100.0 * 369.0 / 370.0;
        assert!((agreement.agreement_pct - expected).abs() < 1e-12);
    }

    #[test]
    fn compare_requires_shared_cells() {
        let empty_a = StrategyChart::new_empty(ChartVariant::S17);
        let err = compare_charts(&empty_a, chart(ChartVariant::S17));
        assert!(matches!(err, Err(Error::InvalidComparison(_))));
    }

    #[test]
    fn csv_round_trip() {
        let c = chart(ChartVariant::H17);
        let csv = c.to_csv();
        let parsed = StrategyChart::parse_csv(&csv, ChartVariant::H17).unwrap();
        let agreement = compare_charts(c, &parsed).unwrap();
        assert_eq!(agreement.agreement_pct, 100.0);
        assert_eq!(agreement.skipped_cells, 0);
        // Fallbacks survive the round trip too.
        for (kind, row, up, cell) in c.cells() {
            assert_eq!(parsed.cell(kind, row, up).unwrap(), Some(cell));
        }
    }
}
