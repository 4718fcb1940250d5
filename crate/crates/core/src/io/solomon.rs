//! Reader and writer for the Solomon VRPTW benchmark layout:
//!
//! ```text
//! C101
//!
//! VEHICLE
//! NUMBER     CAPACITY
//!   25         200
//!
//! CUSTOMER
//! CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME
//!
//!     0      40         50          0          0       1236          0
//!     1      45         68         10        912        967         90
//! ```
//!
//! Row 0 is the depot. Column separation is any whitespace.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Customer, Instance, InstanceError};

const COLUMNS: [&str; 7] = ["CUST NO.", "XCOORD.", "YCOORD.", "DEMAND", "READY TIME", "DUE DATE", "SERVICE TIME"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("missing VEHICLE section")]
    MissingVehicleSection,
    #[error("missing vehicle number/capacity line")]
    MissingVehicleLine,
    #[error("missing CUSTOMER section")]
    MissingCustomerSection,
    #[error("missing depot row (customer 0)")]
    MissingDepot,
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("field {field} is not a valid number: {value:?}")]
    NonNumeric { field: &'static str, value: String },
    #[error("duplicate customer id {0}")]
    DuplicateId(u32),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{kind}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ParseError {
    /// 1-based line number, when the problem is tied to a line.
    pub line: Option<usize>,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn at(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line: Some(line), kind }
    }

    fn global(kind: ParseErrorKind) -> Self {
        ParseError { line: None, kind }
    }
}

fn starts_numeric(line: &str) -> bool {
    line.split_whitespace().next().is_some_and(|t| t.parse::<f64>().is_ok())
}

fn number(field: &'static str, token: &str, line: usize) -> Result<f64, ParseError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::at(line, ParseErrorKind::NonNumeric { field, value: token.to_owned() })),
    }
}

fn integer(field: &'static str, token: &str, line: usize) -> Result<u32, ParseError> {
    token
        .parse::<u32>()
        .map_err(|_| ParseError::at(line, ParseErrorKind::NonNumeric { field, value: token.to_owned() }))
}

pub fn parse_solomon_bytes(bytes: &[u8]) -> Result<Instance, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::global(ParseErrorKind::NotUtf8))?;
    parse_solomon(text)
}

pub fn parse_solomon(text: &str) -> Result<Instance, ParseError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let vehicle_at = lines
        .iter()
        .position(|(_, l)| *l == "VEHICLE")
        .ok_or_else(|| ParseError::global(ParseErrorKind::MissingVehicleSection))?;
    let name = lines[..vehicle_at].iter().find(|(_, l)| !l.is_empty()).map(|(_, l)| l.to_string()).unwrap_or_default();
    let mut rest = lines[vehicle_at + 1..].iter().filter(|(_, l)| !l.is_empty()).peekable();

    // vehicle header, then "<number> <capacity>"
    while rest.peek().is_some_and(|(_, l)| !starts_numeric(l) && *l != "CUSTOMER") {
        rest.next();
    }
    let &(vline, vtext) = rest
        .next()
        .filter(|(_, l)| starts_numeric(l))
        .ok_or_else(|| ParseError::global(ParseErrorKind::MissingVehicleLine))?;
    let vtokens: Vec<&str> = vtext.split_whitespace().collect();
    if vtokens.len() != 2 {
        return Err(ParseError::at(vline, ParseErrorKind::FieldCount { expected: 2, found: vtokens.len() }));
    }
    let max_vehicles = integer("NUMBER", vtokens[0], vline)?;
    let capacity = number("CAPACITY", vtokens[1], vline)?;

    match rest.next() {
        Some((_, "CUSTOMER")) => {}
        _ => return Err(ParseError::global(ParseErrorKind::MissingCustomerSection)),
    }
    while rest.peek().is_some_and(|(_, l)| !starts_numeric(l)) {
        rest.next();
    }

    let mut depot = None;
    let mut customers = Vec::new();
    let mut line_of: HashMap<u32, usize> = HashMap::new();
    for &(ln, row) in rest {
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != COLUMNS.len() {
            return Err(ParseError::at(
                ln,
                ParseErrorKind::FieldCount { expected: COLUMNS.len(), found: tokens.len() },
            ));
        }
        let id = integer(COLUMNS[0], tokens[0], ln)?;
        let mut v = [0.0; 6];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = number(COLUMNS[k + 1], tokens[k + 1], ln)?;
        }
        if line_of.insert(id, ln).is_some() {
            return Err(ParseError::at(ln, ParseErrorKind::DuplicateId(id)));
        }
        let c = Customer::new(id, (v[0], v[1]), v[2], (v[3], v[4]), v[5]);
        if id == 0 {
            depot = Some(c);
        } else {
            customers.push(c);
        }
    }
    let depot = depot.ok_or_else(|| ParseError::global(ParseErrorKind::MissingDepot))?;
    Instance::new(name, depot, customers, capacity, max_vehicles).map_err(|e| {
        let line = match &e {
            InstanceError::NonFinite(id)
            | InstanceError::NegativeDemand(id)
            | InstanceError::NegativeServiceTime(id)
            | InstanceError::InvertedWindow(id)
            | InstanceError::DuplicateId(id)
            | InstanceError::DepotIdCollision(id)
            | InstanceError::DemandExceedsCapacity { id, .. } => line_of.get(id).copied(),
            InstanceError::DepotDemand => line_of.get(&0).copied(),
            InstanceError::BadCapacity | InstanceError::NoVehicles => Some(vline),
            InstanceError::NoCustomers | InstanceError::ZeroCustomerId => None,
        };
        ParseError { line, kind: e.into() }
    })
}

/// Writes `instance` in Solomon layout. Numbers use the shortest
/// representation that reads back to the same value.
pub fn emit_solomon(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}\n", instance.name());
    let _ = writeln!(out, "VEHICLE\nNUMBER     CAPACITY");
    let _ = writeln!(out, "{:>5} {:>12}\n", instance.max_vehicles(), instance.vehicle_capacity());
    let _ = writeln!(out, "CUSTOMER");
    let _ = writeln!(out, "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n");
    for c in std::iter::once(instance.depot()).chain(instance.customers()) {
        let _ = writeln!(
            out,
            "{:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            c.id, c.x, c.y, c.demand, c.ready_time, c.due_time, c.service_time
        );
    }
    out
}
