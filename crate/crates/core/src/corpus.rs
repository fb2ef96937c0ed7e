//! Built-in models: the six-requirement running example, the merge dilemma,
//! the two-solution fixture and the cafeteria ordering system.
//!
//! The same models ship as JSON under `data/`; a test keeps the files in sync
//! with the constructors here.

use crate::error::{Error, Result};
use crate::model::{AttributePrimitive, Constraint, GameParams, Model, Requirement, RequirementId, TradeoffMatrix};
use crate::reduction;
use crate::utility::default_tradeoff_matrix;

pub const NAMES: [&str; 4] = ["running-example", "dilemma", "two-solutions", "cos"];

/// Looks up a built-in model by id.
pub fn by_name(name: &str) -> Result<Model> {
    match name {
        "running-example" => Ok(running_example()),
        "dilemma" => Ok(dilemma_fixture()),
        "two-solutions" => Ok(reduction::two_solution_fixture()),
        "cos" => Ok(cos_model()),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

fn pair(a: &str, b: &str) -> (RequirementId, RequirementId) {
    (RequirementId::from(a), RequirementId::from(b))
}

/// Three functional requirements, three scenarios, two constraints.
pub fn running_example() -> Model {
    let mut p = AttributePrimitive::new("running-example");
    p.requirements = vec![
        Requirement::functional("f1", "functional requirement 1"),
        Requirement::functional("f2", "functional requirement 2"),
        Requirement::functional("f3", "functional requirement 3"),
        Requirement::scenario("q1", "scenario 1", "g1"),
        Requirement::scenario("q2", "scenario 2", "g1"),
        Requirement::scenario("q3", "scenario 3", "g2"),
    ];
    p.constraints = vec![
        Constraint::new("c1", ["q1", "q3"]),
        Constraint::new("c2", ["q1"]),
    ];
    p.depends.insert(pair("f1", "f2"));
    for (q, f) in [("q1", "f1"), ("q1", "f2"), ("q2", "f1"), ("q2", "f2"), ("q3", "f3")] {
        p.derives.insert(pair(q, f));
    }
    p.tradeoff = TradeoffMatrix::new(
        vec!["g1".into(), "g2".into()],
        vec![vec![0, 1], vec![-1, 0]],
    )
    .expect("static matrix");
    let params = GameParams::new(0.5, 0.4, 0.1, -0.5, 3).expect("static params");
    Model::new(p, Some(params))
}

/// Four requirements where the larger merge is later undone by a sub-coalition.
///
/// `d1` and `d4` are scenarios of different general scenarios; `d2`, `d3` are
/// functional. Positive relevance values are fixed directly; the remaining
/// pairs are irrelevant and receive λ = -0.7.
pub fn dilemma_fixture() -> Model {
    let mut p = AttributePrimitive::new("dilemma");
    p.requirements = vec![
        Requirement::scenario("d1", "critical quality scenario", "ga"),
        Requirement::functional("d2", "functional requirement"),
        Requirement::functional("d3", "functional requirement"),
        Requirement::scenario("d4", "competing quality scenario", "gb"),
    ];
    p.tradeoff = TradeoffMatrix::new(
        vec!["ga".into(), "gb".into()],
        vec![vec![0, 0], vec![-1, 0]],
    )
    .expect("static matrix");
    p.set_raw_relevance("d1", "d2", 0.1);
    p.set_raw_relevance("d1", "d3", 0.1);
    p.set_raw_relevance("d2", "d3", 0.1);
    p.set_raw_relevance("d2", "d4", 0.5);
    let params = GameParams::new(0.5, 0.4, 0.1, -0.7, 2).expect("static params");
    Model::new(p, Some(params))
}

/// Cafeteria ordering system: 49 functional requirements, 11 scenarios and 7
/// design constraints.
///
/// The source material describes requirements in prose only. Every
/// dependency, derivation and constraint membership below carries a note:
/// `stated` when the source names the link, otherwise the inference made.
pub fn cos_model() -> Model {
    let mut p = AttributePrimitive::new("cos");

    let functional: [(&str, &str); 49] = [
        ("Order.Place", "Place a meal order"),
        ("Order.Place.Register", "Check that the patron is registered for payroll deduction"),
        ("Order.Place.No", "Let an unregistered patron register and keep ordering"),
        ("Order.Place.Date", "Ask the patron for the meal date"),
        ("Order.Place.Cutoff", "Refuse a same-day order placed after the cutoff time"),
        ("Order.Deliver", "Choose between delivery and pickup"),
        ("Order.Deliver.Select", "Patron states whether the order is delivered or picked up"),
        ("Order.Deliver.Location", "Collect a valid delivery location"),
        ("Order.Deliver.Notimes", "Tell the patron that no delivery slots remain"),
        ("Order.Deliver.Times", "List the remaining delivery slots for the meal date"),
        ("Order.Menu", "View a menu"),
        ("Order.Menu.Date", "Show the menu for the chosen date"),
        ("Order.Menu.Available", "List only items that are in stock and deliverable"),
        ("Order.Units", "Order several meals and food items"),
        ("Order.Units.Multiple", "Allow several identical meals in one order"),
        ("Order.Units.TooMany", "Report the maximum quantity when inventory is short"),
        ("Order.Confirm", "Confirm an order"),
        ("Order.Confirm.Display", "Show ordered items, prices and the amount due"),
        ("Order.Confirm.Prompt", "Ask the patron to confirm"),
        ("Order.Confirm.Response", "Patron confirms, edits or cancels"),
        ("Order.Confirm.More", "Let the patron add meals for any date"),
        ("Order.Pay", "Pay for an order"),
        ("Order.Pay.Method", "Ask for a payment method"),
        ("Order.Pay.Deliver", "Delivered orders are paid by payroll deduction"),
        ("Order.Pay.Pickup", "Pickup orders are paid by deduction or cash"),
        ("Order.Pay.Deduct", "Send a deduction request to payroll"),
        ("Order.Pay.OK", "Show a confirmation when payment is accepted"),
        ("Order.Pay.NG", "Show the reason when payment is rejected"),
        ("Order.Done", "Complete the order after confirmation"),
        ("Order.Done.Store", "Number and store the order"),
        ("Order.Done.Inventory", "Tell the inventory system how many units were ordered"),
        ("Order.Done.Menu", "Remove sold-out items from the menu of the order date"),
        ("Order.Done.Times", "Update the remaining delivery slots"),
        ("Order.Done.Patron", "Mail the order and payment details to the patron"),
        ("Order.Done.Cafeteria", "Mail the order details to cafeteria staff"),
        ("Order.Done.Failure", "Roll back and notify the user when completion fails"),
        ("Order.Retrieve", "Retrieve a previously placed order"),
        ("UI2", "Every page links to help for that page"),
        ("UI3", "Pages allow full navigation and item selection"),
        ("SI1.1", "Send ordered quantities to the inventory system"),
        ("SI1.2", "Ask the inventory system whether an item is available"),
        ("SI1.3", "Drop items the inventory system reports as unavailable"),
        ("SI2.1", "Query payroll for a patron's deduction registration"),
        ("SI2.2", "Submit a new deduction registration to payroll"),
        ("SI2.3", "Submit a deduction request to payroll"),
        ("SI2.4", "Receive payroll's acceptance or rejection"),
        ("SI2.5", "Receive payroll's settlement notice for an order"),
        ("CI1", "Message the patron that the order was accepted"),
        ("CI2", "Message the patron about any problem"),
    ];
    // ROB1 and SAF1 have no column of their own in the six-attribute matrix;
    // recovery of interrupted orders is read as availability, allergen
    // display as usability.
    let scenarios: [(&str, &str, &str); 11] = [
        ("USE1", "Reorder a previous meal with a single interaction", "Usability"),
        ("USE2", "Most new users order without errors on the first try", "Usability"),
        ("PER1", "Serve hundreds of users with a hundred concurrent at peak", "Performance"),
        ("PER2", "Pages download within a few seconds", "Performance"),
        ("PER3", "Confirmation messages appear within seconds", "Performance"),
        ("SEC1", "Encrypt transactions carrying financial or personal data", "Security"),
        ("SEC2", "Require log-on for everything except browsing menus", "Security"),
        ("SEC4", "Patrons only see their own orders", "Security"),
        ("SAF1", "Show ingredients that can cause allergic reactions", "Usability"),
        ("AVL1", "High availability during operating hours", "Availability"),
        ("ROB1", "Recover an order interrupted by a lost connection", "Availability"),
    ];
    p.requirements = functional
        .iter()
        .map(|(id, d)| Requirement::functional(*id, *d))
        .chain(scenarios.iter().map(|(id, d, g)| Requirement::scenario(*id, *d, *g)))
        .collect();

    p.constraints = vec![
        // orders are persisted to and read back from the corporate database
        Constraint::new("CO-2", ["Order.Done.Store", "Order.Retrieve"])
            .with_description("Use the corporate standard database engine"),
        // the constraint governs every generated page
        Constraint::new("CO-3", ["UI2", "UI3", "USE2"]).with_description("Pages conform to HTML5"),
        // delivery windows shape the slot list and its updates
        Constraint::new(
            "BR-2",
            ["Order.Deliver.Times", "Order.Deliver.Notimes", "Order.Done.Times"],
        )
        .with_description("Deliveries happen within the lunch window"),
        // one order, one location
        Constraint::new("BR-3", ["Order.Deliver.Location"])
            .with_description("All meals of an order go to one location"),
        // stated for Order.Place.Date; the cutoff check is about the same date
        Constraint::new("BR-8", ["Order.Place.Date", "Order.Place.Cutoff"])
            .with_description("Meals are ordered at most two weeks ahead"),
        // stated for Order.Pay.Deliver; the rule mandates payroll deduction
        Constraint::new("BR-11", ["Order.Pay.Deliver", "Order.Pay.Deduct"])
            .with_description("Delivered orders are paid by payroll deduction"),
        // stated for SEC1; the deduction request carries financial data
        Constraint::new("BR-33", ["SEC1", "Order.Pay.Deduct"])
            .with_description("Financial transmissions are strongly encrypted"),
    ];

    // (dependent, dependency)
    let depends: &[(&str, &str)] = &[
        // sub-requirement hierarchy: every child depends on its parent
        ("Order.Place.Register", "Order.Place"),
        ("Order.Place.No", "Order.Place.Register"),
        ("Order.Place.Date", "Order.Place"),
        ("Order.Place.Cutoff", "Order.Place.Date"),
        ("Order.Deliver.Select", "Order.Deliver"),
        ("Order.Deliver.Location", "Order.Deliver"),
        ("Order.Deliver.Notimes", "Order.Deliver"),
        ("Order.Deliver.Times", "Order.Deliver"),
        ("Order.Menu.Date", "Order.Menu"),
        ("Order.Menu.Available", "Order.Menu"),
        ("Order.Units.Multiple", "Order.Units"),
        ("Order.Units.TooMany", "Order.Units"),
        ("Order.Confirm.Display", "Order.Confirm"),
        ("Order.Confirm.Prompt", "Order.Confirm"),
        ("Order.Confirm.Response", "Order.Confirm"),
        ("Order.Confirm.More", "Order.Confirm"),
        ("Order.Pay.Method", "Order.Pay"),
        ("Order.Pay.Deliver", "Order.Pay"),
        ("Order.Pay.Pickup", "Order.Pay"),
        ("Order.Pay.Deduct", "Order.Pay"),
        ("Order.Pay.OK", "Order.Pay"),
        ("Order.Pay.NG", "Order.Pay"),
        ("Order.Done.Store", "Order.Done"),
        ("Order.Done.Inventory", "Order.Done"),
        ("Order.Done.Menu", "Order.Done"),
        ("Order.Done.Times", "Order.Done"),
        ("Order.Done.Patron", "Order.Done"),
        ("Order.Done.Cafeteria", "Order.Done"),
        ("Order.Done.Failure", "Order.Done"),
        // completion only happens once the patron confirms
        ("Order.Done", "Order.Confirm.Response"),
        // slot choice presupposes that delivery was selected
        ("Order.Deliver.Location", "Order.Deliver.Times"),
        // payment rules branch on delivery versus pickup
        ("Order.Pay.Deliver", "Order.Deliver.Select"),
        ("Order.Pay.Pickup", "Order.Deliver.Select"),
        // outcome messages follow the deduction request
        ("Order.Pay.OK", "Order.Pay.Deduct"),
        ("Order.Pay.NG", "Order.Pay.Deduct"),
        // the menu is shown for the date captured while placing the order
        ("Order.Menu.Date", "Order.Place.Date"),
        // inventory-backed behaviour goes through the inventory interface
        ("Order.Menu.Available", "SI1.2"),
        ("Order.Units.TooMany", "SI1.2"),
        ("Order.Done.Inventory", "SI1.1"),
        ("Order.Done.Menu", "SI1.3"),
        // payroll-backed behaviour goes through the payroll interface
        ("Order.Place.Register", "SI2.1"),
        ("Order.Place.No", "SI2.2"),
        ("Order.Pay.Deduct", "SI2.3"),
        ("Order.Pay.OK", "SI2.4"),
        ("Order.Pay.NG", "SI2.4"),
        ("Order.Done.Patron", "SI2.5"),
        // patron notifications use the communication interface
        ("Order.Done.Patron", "CI1"),
        ("Order.Done.Failure", "CI2"),
    ];
    p.depends = depends.iter().map(|(a, b)| pair(a, b)).collect();

    // (scenario, derived functional requirement)
    let derives: &[(&str, &str)] = &[
        // stated
        ("SEC1", "Order.Pay.Deduct"),
        // the payroll request leaves the system and must be encrypted
        ("SEC1", "SI2.3"),
        // log-on is enforced where the patron is identified
        ("SEC2", "Order.Place.Register"),
        // own-orders-only applies to looking orders up
        ("SEC4", "Order.Retrieve"),
        // single-interaction reorder needs order retrieval
        ("USE1", "Order.Retrieve"),
        // first-try success relies on help and navigation
        ("USE2", "UI2"),
        ("USE2", "UI3"),
        // peak load is dominated by placing and storing orders
        ("PER1", "Order.Place"),
        ("PER1", "Order.Done.Store"),
        // page download time is dominated by the menu page
        ("PER2", "Order.Menu.Date"),
        // confirmation latency covers the prompt and the payment result
        ("PER3", "Order.Confirm.Prompt"),
        ("PER3", "Order.Pay.OK"),
        // ingredients are shown with menu items
        ("SAF1", "Order.Menu.Date"),
        // rolling back failures keeps the service usable
        ("AVL1", "Order.Done.Failure"),
        // recovering an interrupted order needs retrieval and a resumable placement
        ("ROB1", "Order.Retrieve"),
        ("ROB1", "Order.Place"),
    ];
    p.derives = derives.iter().map(|(a, b)| pair(a, b)).collect();
    p.tradeoff = default_tradeoff_matrix();

    let params = GameParams::new(0.4, 0.3, 0.3, -1.3, 3).expect("static params");
    Model::new(p, Some(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RequirementKind;

    #[test]
    fn all_corpus_models_validate() {
        for name in NAMES {
            let m = by_name(name).unwrap();
            assert_eq!(m.primitive.validate(), vec![], "{name}");
            m.params.unwrap().check().unwrap();
        }
        assert!(by_name("nope").is_err());
    }

    /// Set `ARCHGAME_WRITE_DATA=1` to regenerate the files.
    #[test]
    fn data_files_match_constructors() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        for name in NAMES {
            let path = dir.join(format!("{name}.json"));
            let expected = crate::io::model_to_json(&by_name(name).unwrap());
            if std::env::var_os("ARCHGAME_WRITE_DATA").is_some() {
                std::fs::write(&path, &expected).unwrap();
            }
            let shipped = std::fs::read_to_string(&path).unwrap();
            assert_eq!(shipped, expected, "{name}");
        }
    }

    #[test]
    fn cos_counts_and_params() {
        let m = cos_model();
        let p = &m.primitive;
        assert_eq!(p.scenarios().count(), 11);
        assert_eq!(p.functional().count(), 49);
        assert_eq!(p.constraints.len(), 7);
        let params = m.params.unwrap();
        assert_eq!((params.alpha, params.beta, params.gamma, params.lambda), (0.4, 0.3, 0.3, -1.3));
        assert!(p.derives.contains(&pair("SEC1", "Order.Pay.Deduct")));
        assert_eq!(p.kind_of(&"SEC1".into()).unwrap(), RequirementKind::Scenario);
    }
}
