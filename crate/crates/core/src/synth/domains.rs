//! Built-in domain templates.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::template::{Arg, Binding, CallTemplate, Complication, DomainTemplate, FieldGen, IntentTemplate, TableTemplate};
use crate::env_sim::{DomainOp, Guard, ValueSource};
use crate::tool_registry::{
    LatencyModel, ParamSpec, ParamType, PricingEntry, ScriptedTool, ToolBinding, ToolKind, ToolSpec,
};

const CITIES: &[&str] = &[
    "Lisbon", "Oslo", "Denver", "Osaka", "Nairobi", "Lima", "Toronto", "Seoul", "Madrid", "Perth", "Dublin", "Austin",
];

pub const DOMAINS: [&str; 5] = ["finance", "ecommerce", "medicine", "restaurant", "travel"];

/// Looks up a built-in template by domain name.
pub fn domain_template(name: &str) -> Option<DomainTemplate> {
    match name {
        "finance" => Some(finance()),
        "ecommerce" => Some(ecommerce()),
        "medicine" => Some(medicine()),
        "restaurant" => Some(restaurant()),
        "travel" => Some(travel()),
        _ => None,
    }
}

pub fn all_domain_templates() -> Vec<DomainTemplate> {
    DOMAINS.iter().filter_map(|d| domain_template(d)).collect()
}

fn table(
    name: &'static str,
    key_field: &'static str,
    id_prefix: &'static str,
    default_size: usize,
    fields: Vec<(&'static str, FieldGen)>,
) -> TableTemplate {
    TableTemplate {
        name,
        key_field,
        id_prefix,
        fields,
        default_size,
    }
}

fn s(name: &str) -> ParamSpec {
    ParamSpec::required(name, ParamType::String, &name.replace('_', " "))
}

fn n(name: &str) -> ParamSpec {
    ParamSpec::required(name, ParamType::Number, &name.replace('_', " "))
}

fn choice(name: &str, values: &[&str]) -> ParamSpec {
    ParamSpec {
        choices: values.iter().map(|v| v.to_string()).collect(),
        ..ParamSpec::required(name, ParamType::Enum, &name.replace('_', " "))
    }
}

fn domain_tool(name: &str, description: &str, params: Vec<ParamSpec>, op: DomainOp) -> ToolSpec {
    let cost = if op.is_write() { "db_write" } else { "db_read" };
    ToolSpec {
        name: name.into(),
        description: description.into(),
        params,
        kind: ToolKind::DomainFunction,
        pricing_ref: cost.into(),
        latency_ref: cost.into(),
        binding: Some(ToolBinding::Domain(op)),
    }
}

fn get(name: &str, table: &str, key: &str) -> ToolSpec {
    domain_tool(
        name,
        &format!("Returns the {table} record with the given id."),
        vec![s(key)],
        DomainOp::Get {
            table: table.into(),
            key_param: key.into(),
        },
    )
}

fn search(name: &str, table: &str, field: &str, param: ParamSpec) -> ToolSpec {
    let value_param = param.name.clone();
    domain_tool(
        name,
        &format!("Lists {table} whose {field} matches."),
        vec![param],
        DomainOp::Search {
            table: table.into(),
            field: field.into(),
            value_param,
        },
    )
}

fn set_fixed(name: &str, description: &str, table: &str, key: &str, field: &str, value: Value, blocked: &[Value]) -> ToolSpec {
    domain_tool(
        name,
        description,
        vec![s(key)],
        DomainOp::SetField {
            table: table.into(),
            key_param: key.into(),
            field: field.into(),
            value: ValueSource::Fixed(value),
            guard: Some(Guard {
                field: field.into(),
                not_in: blocked.to_vec(),
            }),
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn set_param(
    name: &str,
    description: &str,
    table: &str,
    key: &str,
    field: &str,
    param: ParamSpec,
    guard: Option<(&str, &[Value])>,
) -> ToolSpec {
    let value = ValueSource::Param(param.name.clone());
    domain_tool(
        name,
        description,
        vec![s(key), param],
        DomainOp::SetField {
            table: table.into(),
            key_param: key.into(),
            field: field.into(),
            value,
            guard: guard.map(|(f, blocked)| Guard {
                field: f.into(),
                not_in: blocked.to_vec(),
            }),
        },
    )
}

fn adjust(name: &str, description: &str, table: &str, key: &str, field: &str, amount: &str, sign: f64) -> ToolSpec {
    domain_tool(
        name,
        description,
        vec![s(key), n(amount)],
        DomainOp::Adjust {
            table: table.into(),
            key_param: key.into(),
            field: field.into(),
            amount_param: amount.into(),
            sign,
            min_result: (sign < 0.0).then_some(0.0),
        },
    )
}

fn insert(name: &str, description: &str, table: &str, key: &str, params: Vec<ParamSpec>, defaults: Value) -> ToolSpec {
    let field_params: BTreeMap<String, String> = params.iter().map(|p| (p.name.clone(), p.name.clone())).collect();
    let defaults = match defaults {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    let mut all = vec![s(key)];
    all.extend(params);
    domain_tool(
        name,
        description,
        all,
        DomainOp::Insert {
            table: table.into(),
            key_param: key.into(),
            field_params,
            defaults,
        },
    )
}

fn delete(name: &str, table: &str, key: &str) -> ToolSpec {
    domain_tool(
        name,
        &format!("Deletes a {table} record that nothing else refers to."),
        vec![s(key)],
        DomainOp::Delete {
            table: table.into(),
            key_param: key.into(),
        },
    )
}

fn calculator() -> ToolSpec {
    ToolSpec {
        name: "calculate".into(),
        description: "Evaluates an arithmetic expression such as `12.5 * 3 - 4`.".into(),
        params: vec![s("expr")],
        kind: ToolKind::CodeInterpreter,
        pricing_ref: "compute".into(),
        latency_ref: "compute".into(),
        binding: Some(ToolBinding::Scripted(ScriptedTool::Calculator)),
    }
}

fn hand_off() -> ToolSpec {
    ToolSpec {
        name: "transfer_to_human_agents".into(),
        description: "Hands the conversation to a human agent and ends the session.".into(),
        params: vec![ParamSpec::optional("summary", ParamType::String, "summary of the issue")],
        kind: ToolKind::DomainFunction,
        pricing_ref: "human".into(),
        latency_ref: "human".into(),
        binding: Some(ToolBinding::Scripted(ScriptedTool::Terminate {
            message: "You are now connected to a human agent.".into(),
        })),
    }
}

fn standard_costs() -> (BTreeMap<String, PricingEntry>, BTreeMap<String, LatencyModel>) {
    let pricing = BTreeMap::from([
        ("db_read".to_string(), PricingEntry::per_token(0.15, 0.6)),
        ("db_write".to_string(), PricingEntry::per_token(0.3, 1.2)),
        ("compute".to_string(), PricingEntry::flat(0.0001)),
        ("human".to_string(), PricingEntry::flat(0.5)),
    ]);
    let lat = |base: f64, per: f64| LatencyModel {
        per_output_token: per,
        ..LatencyModel::constant(base)
    };
    let latency = BTreeMap::from([
        ("db_read".to_string(), lat(0.08, 0.0005)),
        ("db_write".to_string(), lat(0.15, 0.0005)),
        ("compute".to_string(), lat(0.05, 0.0)),
        ("human".to_string(), lat(30.0, 0.0)),
    ]);
    (pricing, latency)
}

fn key(table: &'static str) -> Binding {
    Binding::Key { table, filter: None }
}

fn key_where(table: &'static str, field: &'static str, values: &'static [&'static str]) -> Binding {
    Binding::Key {
        table,
        filter: Some((field, values)),
    }
}

fn field(of: &'static str, table: &'static str, name: &'static str) -> Binding {
    Binding::Field { of, table, field: name }
}

fn after(of: &'static str, table: &'static str, name: &'static str) -> Binding {
    Binding::After { of, table, field: name }
}

/// A call whose arguments are all variables of the same name as the parameter.
fn call(tool: &'static str, params: &[&'static str]) -> CallTemplate {
    CallTemplate {
        tool,
        args: params.iter().map(|p| (*p, Arg::Var(p))).collect(),
    }
}

/// A call whose arguments map parameters to differently named variables.
fn call_as(tool: &'static str, args: &[(&'static str, &'static str)]) -> CallTemplate {
    CallTemplate {
        tool,
        args: args.iter().map(|(p, v)| (*p, Arg::Var(v))).collect(),
    }
}

fn intent(
    id: &'static str,
    bindings: Vec<(&'static str, Binding)>,
    instruction: &'static str,
    calls: Vec<CallTemplate>,
    required_info: &'static str,
    complications: Vec<Complication>,
) -> IntentTemplate {
    IntentTemplate {
        id,
        bindings,
        instruction,
        calls,
        required_info,
        complications,
    }
}

fn complication(
    id: &'static str,
    bindings: Vec<(&'static str, Binding)>,
    instruction: &'static str,
    calls: Vec<CallTemplate>,
    required_info: &'static str,
) -> Complication {
    Complication {
        id,
        bindings,
        instruction,
        calls,
        required_info,
    }
}

fn finance() -> DomainTemplate {
    let tables = vec![
        table("branches", "branch_id", "BR", 20, vec![("city", FieldGen::Pool(CITIES)), ("manager", FieldGen::Person)]),
        table(
            "customers",
            "customer_id",
            "C",
            150,
            vec![
                ("name", FieldGen::Person),
                ("phone", FieldGen::Pool(&["555-0101", "555-0142", "555-0177", "555-0190", "555-0123"])),
                ("tier", FieldGen::Enum(&["basic", "gold", "platinum"])),
                ("branch_id", FieldGen::Ref("branches")),
            ],
        ),
        table(
            "accounts",
            "account_id",
            "A",
            240,
            vec![
                ("customer_id", FieldGen::Ref("customers")),
                ("kind", FieldGen::Enum(&["checking", "savings"])),
                ("balance", FieldGen::Money(50.0, 20000.0)),
                ("status", FieldGen::Enum(&["active", "active", "active", "frozen", "closed"])),
            ],
        ),
        table(
            "cards",
            "card_id",
            "CD",
            120,
            vec![
                ("account_id", FieldGen::Ref("accounts")),
                ("status", FieldGen::Enum(&["active", "active", "blocked"])),
                ("daily_limit", FieldGen::Int(500, 5000)),
            ],
        ),
        table(
            "loans",
            "loan_id",
            "L",
            80,
            vec![
                ("customer_id", FieldGen::Ref("customers")),
                ("outstanding", FieldGen::Money(1000.0, 50000.0)),
                ("rate", FieldGen::Money(2.0, 12.0)),
            ],
        ),
        table(
            "payees",
            "payee_id",
            "P",
            76,
            vec![
                ("customer_id", FieldGen::Ref("customers")),
                ("name", FieldGen::Person),
                ("account_number", FieldGen::Int(10_000_000, 99_999_999)),
            ],
        ),
    ];
    let tools = vec![
        get("get_customer", "customers", "customer_id"),
        search("find_customers_by_name", "customers", "name", s("name")),
        get("get_account", "accounts", "account_id"),
        search("list_customer_accounts", "accounts", "customer_id", s("customer_id")),
        adjust("deposit", "Adds money to an account.", "accounts", "account_id", "balance", "amount", 1.0),
        adjust("withdraw", "Takes money out of an account.", "accounts", "account_id", "balance", "amount", -1.0),
        domain_tool(
            "transfer_funds",
            "Moves money between two accounts.",
            vec![s("from_account_id"), s("to_account_id"), n("amount")],
            DomainOp::Transfer {
                table: "accounts".into(),
                from_param: "from_account_id".into(),
                to_param: "to_account_id".into(),
                field: "balance".into(),
                amount_param: "amount".into(),
            },
        ),
        set_fixed("freeze_account", "Freezes an active account.", "accounts", "account_id", "status", json!("frozen"), &[json!("frozen"), json!("closed")]),
        set_fixed("unfreeze_account", "Reactivates a frozen account.", "accounts", "account_id", "status", json!("active"), &[json!("active"), json!("closed")]),
        get("get_card", "cards", "card_id"),
        set_fixed("block_card", "Blocks a card.", "cards", "card_id", "status", json!("blocked"), &[json!("blocked")]),
        set_param("set_card_limit", "Changes the daily spending limit of a card.", "cards", "card_id", "daily_limit", n("limit"), None),
        get("get_loan", "loans", "loan_id"),
        adjust("make_loan_payment", "Pays down a loan.", "loans", "loan_id", "outstanding", "amount", -1.0),
        get("get_branch", "branches", "branch_id"),
        search("find_branches_by_city", "branches", "city", s("city")),
        get("get_payee", "payees", "payee_id"),
        insert(
            "add_payee",
            "Registers a new payee for a customer.",
            "payees",
            "payee_id",
            vec![s("customer_id"), s("name"), n("account_number")],
            json!({}),
        ),
        delete("remove_payee", "payees", "payee_id"),
        set_param("update_customer_phone", "Changes a customer's phone number.", "customers", "customer_id", "phone", s("phone"), None),
        calculator(),
        hand_off(),
    ];
    let intents = vec![
        intent(
            "transfer",
            vec![
                ("from_account_id", key_where("accounts", "status", &["active"])),
                ("to_account_id", Binding::OtherKey { table: "accounts", other: "from_account_id", filter: Some(("status", &["active"])) }),
                ("amount", Binding::AmountUpTo { of: "from_account_id", table: "accounts", field: "balance" }),
                ("remaining", after("from_account_id", "accounts", "balance")),
            ],
            "Please move {amount} dollars from account {from_account_id} to account {to_account_id} and tell me what is left.",
            vec![call("transfer_funds", &["from_account_id", "to_account_id", "amount"])],
            "{remaining}",
            vec![complication(
                "freeze_destination",
                vec![],
                "Once the money has arrived, freeze account {to_account_id}.",
                vec![call_as("freeze_account", &[("account_id", "to_account_id")])],
                "{to_account_id} frozen",
            )],
        ),
        intent(
            "block_card",
            vec![("card_id", key_where("cards", "status", &["active"]))],
            "My card {card_id} was stolen. Block it right away.",
            vec![call("block_card", &["card_id"])],
            "{card_id} blocked",
            vec![complication(
                "lower_limit",
                vec![("limit", Binding::Amount(100, 400))],
                "Also set its daily limit to {limit}.",
                vec![call("set_card_limit", &["card_id", "limit"])],
                "limit {limit}",
            )],
        ),
        intent(
            "loan_payment",
            vec![
                ("loan_id", key("loans")),
                ("amount", Binding::Amount(100, 900)),
                ("remaining", after("loan_id", "loans", "outstanding")),
            ],
            "Pay {amount} dollars toward loan {loan_id}. How much will I still owe?",
            vec![call("make_loan_payment", &["loan_id", "amount"])],
            "{remaining}",
            vec![complication(
                "fund_from_account",
                vec![("account_id", Binding::Key { table: "accounts", filter: Some(("kind", &["checking"])) })],
                "Take the same amount out of account {account_id}.",
                vec![call("withdraw", &["account_id", "amount"])],
                "withdrawn from {account_id}",
            )],
        ),
        intent(
            "customer_profile",
            vec![
                ("customer_id", key("customers")),
                ("tier", field("customer_id", "customers", "tier")),
                ("branch_id", field("customer_id", "customers", "branch_id")),
                ("city", field("branch_id", "branches", "city")),
            ],
            "What tier is customer {customer_id} on, and in which city is their home branch {branch_id}?",
            vec![call("get_customer", &["customer_id"]), call("get_branch", &["branch_id"])],
            "{tier} tier in {city}",
            vec![complication(
                "account_balance",
                vec![
                    ("account_id", key("accounts")),
                    ("balance", field("account_id", "accounts", "balance")),
                ],
                "Also tell me the balance of account {account_id}.",
                vec![call("get_account", &["account_id"])],
                "balance {balance}",
            )],
        ),
        intent(
            "add_payee",
            vec![
                ("customer_id", key("customers")),
                ("payee_id", Binding::FreshKey { table: "payees" }),
                ("name", Binding::Choice(&["Rosa Marin", "Tom Velde", "Ana Kovac", "Sam Oduya"])),
                ("account_number", Binding::Amount(10_000_000, 99_999_999)),
            ],
            "Customer {customer_id} wants to add {name} (account {account_number}) as payee {payee_id}.",
            vec![call("add_payee", &["payee_id", "customer_id", "name", "account_number"])],
            "payee {payee_id} added",
            vec![],
        ),
        intent(
            "remove_payee",
            vec![("payee_id", key("payees")), ("name", field("payee_id", "payees", "name"))],
            "Remove payee {payee_id} from my list, I no longer pay {name}.",
            vec![call("remove_payee", &["payee_id"])],
            "{payee_id} removed",
            vec![],
        ),
        intent(
            "freeze",
            vec![("account_id", key_where("accounts", "status", &["active"]))],
            "I think account {account_id} is compromised. Freeze it.",
            vec![call("freeze_account", &["account_id"])],
            "{account_id} frozen",
            vec![complication(
                "move_deposit",
                vec![
                    ("other_account_id", Binding::OtherKey { table: "accounts", other: "account_id", filter: Some(("status", &["active"])) }),
                    ("deposit", Binding::Amount(20, 200)),
                ],
                "Then deposit {deposit} dollars into account {other_account_id}.",
                vec![call_as("deposit", &[("account_id", "other_account_id"), ("amount", "deposit")])],
                "deposited {deposit}",
            )],
        ),
    ];
    let (pricing, latency) = standard_costs();
    DomainTemplate {
        domain: "finance",
        tables,
        tools,
        pricing,
        latency,
        intents,
    }
}

fn ecommerce() -> DomainTemplate {
    let tables = vec![
        table(
            "customers",
            "customer_id",
            "U",
            100,
            vec![
                ("name", FieldGen::Person),
                ("city", FieldGen::Pool(CITIES)),
                ("loyalty_points", FieldGen::Int(100, 5000)),
            ],
        ),
        table(
            "products",
            "product_id",
            "PR",
            150,
            vec![
                ("name", FieldGen::Pool(&["desk lamp", "kettle", "backpack", "headphones", "yoga mat", "blender", "monitor", "sneakers"])),
                ("category", FieldGen::Enum(&["home", "electronics", "sports", "kitchen", "apparel"])),
                ("price", FieldGen::Money(5.0, 500.0)),
                ("stock", FieldGen::Int(0, 200)),
            ],
        ),
        table(
            "orders",
            "order_id",
            "O",
            220,
            vec![
                ("customer_id", FieldGen::Ref("customers")),
                ("product_id", FieldGen::Ref("products")),
                ("quantity", FieldGen::Int(1, 5)),
                ("status", FieldGen::Enum(&["pending", "pending", "shipped", "delivered", "cancelled"])),
                ("address", FieldGen::Pool(&["12 Elm St", "4 Harbor Rd", "88 Hill Ave", "7 Mill Ln"])),
            ],
        ),
        table(
            "reviews",
            "review_id",
            "RV",
            107,
            vec![
                ("product_id", FieldGen::Ref("products")),
                ("customer_id", FieldGen::Ref("customers")),
                ("rating", FieldGen::Int(1, 5)),
            ],
        ),
    ];
    let closed = [json!("shipped"), json!("delivered"), json!("cancelled")];
    let tools = vec![
        get("get_customer", "customers", "customer_id"),
        get("get_product", "products", "product_id"),
        search("search_products_by_category", "products", "category", choice("category", &["home", "electronics", "sports", "kitchen", "apparel"])),
        get("get_order", "orders", "order_id"),
        search("list_customer_orders", "orders", "customer_id", s("customer_id")),
        set_fixed("cancel_order", "Cancels an order that has not shipped.", "orders", "order_id", "status", json!("cancelled"), &closed),
        set_param("update_shipping_address", "Changes where an unshipped order goes.", "orders", "order_id", "address", s("address"), Some(("status", &closed))),
        insert(
            "place_order",
            "Places a new order.",
            "orders",
            "order_id",
            vec![s("customer_id"), s("product_id"), n("quantity"), s("address")],
            json!({"status": "pending"}),
        ),
        adjust("restock_product", "Adds units to a product's stock.", "products", "product_id", "stock", "quantity", 1.0),
        adjust("redeem_points", "Spends loyalty points.", "customers", "customer_id", "loyalty_points", "points", -1.0),
        adjust("add_loyalty_points", "Credits loyalty points.", "customers", "customer_id", "loyalty_points", "points", 1.0),
        get("get_review", "reviews", "review_id"),
        insert(
            "post_review",
            "Publishes a product review.",
            "reviews",
            "review_id",
            vec![s("product_id"), s("customer_id"), n("rating")],
            json!({}),
        ),
        delete("delete_review", "reviews", "review_id"),
        calculator(),
    ];
    let intents = vec![
        intent(
            "cancel_order",
            vec![("order_id", key_where("orders", "status", &["pending"]))],
            "Please cancel my order {order_id}, I ordered by mistake.",
            vec![call("cancel_order", &["order_id"])],
            "{order_id} cancelled",
            vec![complication(
                "goodwill_points",
                vec![
                    ("customer_id", field("order_id", "orders", "customer_id")),
                    ("points", Binding::Amount(50, 300)),
                ],
                "As an apology, credit {points} loyalty points to customer {customer_id}.",
                vec![call("add_loyalty_points", &["customer_id", "points"])],
                "{points} points",
            )],
        ),
        intent(
            "change_address",
            vec![
                ("order_id", key_where("orders", "status", &["pending"])),
                ("address", Binding::Choice(&["3 Quay St", "19 Park Row", "250 Bay Blvd"])),
            ],
            "I moved. Ship order {order_id} to {address} instead.",
            vec![call("update_shipping_address", &["order_id", "address"])],
            "{address}",
            vec![],
        ),
        intent(
            "place_order",
            vec![
                ("order_id", Binding::FreshKey { table: "orders" }),
                ("customer_id", key("customers")),
                ("product_id", key("products")),
                ("quantity", Binding::Amount(1, 3)),
                ("address", Binding::Choice(&["12 Elm St", "4 Harbor Rd", "88 Hill Ave"])),
            ],
            "For customer {customer_id}, order {quantity} of product {product_id} to {address} under order number {order_id}.",
            vec![call("place_order", &["order_id", "customer_id", "product_id", "quantity", "address"])],
            "order {order_id} placed",
            vec![],
        ),
        intent(
            "product_info",
            vec![
                ("product_id", key("products")),
                ("price", field("product_id", "products", "price")),
                ("stock", field("product_id", "products", "stock")),
            ],
            "How much does product {product_id} cost and how many are in stock?",
            vec![call("get_product", &["product_id"])],
            "{price} with {stock} in stock",
            vec![complication(
                "order_status",
                vec![
                    ("order_id", key("orders")),
                    ("status", field("order_id", "orders", "status")),
                ],
                "Also, what is the status of order {order_id}?",
                vec![call("get_order", &["order_id"])],
                "order {status}",
            )],
        ),
        intent(
            "post_review",
            vec![
                ("review_id", Binding::FreshKey { table: "reviews" }),
                ("product_id", key("products")),
                ("customer_id", key("customers")),
                ("rating", Binding::Amount(1, 5)),
            ],
            "Customer {customer_id} rates product {product_id} {rating} stars; file it as review {review_id}.",
            vec![call("post_review", &["review_id", "product_id", "customer_id", "rating"])],
            "review {review_id} posted",
            vec![],
        ),
        intent(
            "delete_review",
            vec![("review_id", key("reviews"))],
            "Please take down review {review_id}.",
            vec![call("delete_review", &["review_id"])],
            "{review_id} deleted",
            vec![],
        ),
        intent(
            "redeem",
            vec![
                ("customer_id", key("customers")),
                ("points", Binding::Amount(10, 100)),
                ("balance", after("customer_id", "customers", "loyalty_points")),
            ],
            "Customer {customer_id} wants to redeem {points} loyalty points. What is their balance afterwards?",
            vec![call("redeem_points", &["customer_id", "points"])],
            "{balance} points left",
            vec![],
        ),
    ];
    let (pricing, latency) = standard_costs();
    DomainTemplate {
        domain: "ecommerce",
        tables,
        tools,
        pricing,
        latency,
        intents,
    }
}

fn medicine() -> DomainTemplate {
    let tables = vec![
        table(
            "doctors",
            "doctor_id",
            "D",
            60,
            vec![
                ("name", FieldGen::Person),
                ("specialty", FieldGen::Enum(&["cardiology", "dermatology", "pediatrics", "neurology", "general"])),
                ("accepting", FieldGen::Bool(0.8)),
            ],
        ),
        table(
            "patients",
            "patient_id",
            "PT",
            300,
            vec![
                ("name", FieldGen::Person),
                ("insurance", FieldGen::Enum(&["none", "basic", "premium"])),
                ("primary_doctor", FieldGen::Ref("doctors")),
                ("allergies", FieldGen::Pool(&["none", "penicillin", "latex", "peanuts"])),
            ],
        ),
        table(
            "appointments",
            "appointment_id",
            "AP",
            320,
            vec![
                ("patient_id", FieldGen::Ref("patients")),
                ("doctor_id", FieldGen::Ref("doctors")),
                ("date", FieldGen::Date),
                ("status", FieldGen::Enum(&["scheduled", "scheduled", "completed", "cancelled"])),
            ],
        ),
        table(
            "prescriptions",
            "prescription_id",
            "RX",
            240,
            vec![
                ("patient_id", FieldGen::Ref("patients")),
                ("drug", FieldGen::Pool(&["amoxicillin", "lisinopril", "metformin", "atorvastatin", "ibuprofen"])),
                ("refills", FieldGen::Int(0, 5)),
                ("status", FieldGen::Enum(&["active", "active", "expired"])),
            ],
        ),
    ];
    let closed = [json!("cancelled"), json!("completed")];
    let tools = vec![
        get("get_patient", "patients", "patient_id"),
        search("find_patients_by_name", "patients", "name", s("name")),
        get("get_doctor", "doctors", "doctor_id"),
        search("find_doctors_by_specialty", "doctors", "specialty", choice("specialty", &["cardiology", "dermatology", "pediatrics", "neurology", "general"])),
        get("get_appointment", "appointments", "appointment_id"),
        search("list_patient_appointments", "appointments", "patient_id", s("patient_id")),
        insert(
            "book_appointment",
            "Books an appointment.",
            "appointments",
            "appointment_id",
            vec![s("patient_id"), s("doctor_id"), s("date")],
            json!({"status": "scheduled"}),
        ),
        set_fixed("cancel_appointment", "Cancels a scheduled appointment.", "appointments", "appointment_id", "status", json!("cancelled"), &closed),
        set_param("reschedule_appointment", "Moves a scheduled appointment to another date.", "appointments", "appointment_id", "date", s("date"), Some(("status", &closed))),
        set_fixed("complete_appointment", "Marks an appointment as completed.", "appointments", "appointment_id", "status", json!("completed"), &closed),
        get("get_prescription", "prescriptions", "prescription_id"),
        search("list_patient_prescriptions", "prescriptions", "patient_id", s("patient_id")),
        adjust("use_refill", "Dispenses refills of a prescription.", "prescriptions", "prescription_id", "refills", "count", -1.0),
        adjust("add_refills", "Authorizes more refills.", "prescriptions", "prescription_id", "refills", "count", 1.0),
        set_fixed("expire_prescription", "Ends a prescription.", "prescriptions", "prescription_id", "status", json!("expired"), &[json!("expired")]),
        set_param("update_insurance", "Changes a patient's insurance plan.", "patients", "patient_id", "insurance", choice("insurance", &["none", "basic", "premium"]), None),
        set_param("change_primary_doctor", "Assigns a new primary doctor.", "patients", "patient_id", "primary_doctor", s("doctor_id"), None),
        calculator(),
        hand_off(),
    ];
    let intents = vec![
        intent(
            "book",
            vec![
                ("appointment_id", Binding::FreshKey { table: "appointments" }),
                ("patient_id", key("patients")),
                ("doctor_id", key_where("doctors", "specialty", &["general", "cardiology", "neurology"])),
                ("date", Binding::Choice(&["2025-11-03", "2025-11-10", "2025-11-17"])),
            ],
            "Book patient {patient_id} with doctor {doctor_id} on {date}; use reference {appointment_id}.",
            vec![call("book_appointment", &["appointment_id", "patient_id", "doctor_id", "date"])],
            "{appointment_id} on {date}",
            vec![],
        ),
        intent(
            "cancel",
            vec![("appointment_id", key_where("appointments", "status", &["scheduled"]))],
            "I can't make appointment {appointment_id}. Please cancel it.",
            vec![call("cancel_appointment", &["appointment_id"])],
            "{appointment_id} cancelled",
            vec![complication(
                "rebook",
                vec![
                    ("new_id", Binding::FreshKey { table: "appointments" }),
                    ("patient_id", field("appointment_id", "appointments", "patient_id")),
                    ("doctor_id", field("appointment_id", "appointments", "doctor_id")),
                    ("date", Binding::Choice(&["2025-12-01", "2025-12-08"])),
                ],
                "Then book a new one with the same doctor on {date} as {new_id}.",
                vec![call_as("book_appointment", &[("appointment_id", "new_id"), ("patient_id", "patient_id"), ("doctor_id", "doctor_id"), ("date", "date")])],
                "{new_id} booked",
            )],
        ),
        intent(
            "reschedule",
            vec![
                ("appointment_id", key_where("appointments", "status", &["scheduled"])),
                ("date", Binding::Choice(&["2025-10-20", "2025-10-27", "2025-11-24"])),
            ],
            "Move appointment {appointment_id} to {date}.",
            vec![call("reschedule_appointment", &["appointment_id", "date"])],
            "moved to {date}",
            vec![],
        ),
        intent(
            "add_refills",
            vec![
                ("prescription_id", key_where("prescriptions", "status", &["active"])),
                ("count", Binding::Amount(1, 3)),
                ("refills", after("prescription_id", "prescriptions", "refills")),
            ],
            "Authorize {count} more refills on prescription {prescription_id}. How many refills remain then?",
            vec![call("add_refills", &["prescription_id", "count"])],
            "{refills} refills",
            vec![],
        ),
        intent(
            "insurance",
            vec![
                ("patient_id", key("patients")),
                ("insurance", Binding::Choice(&["none", "basic", "premium"])),
            ],
            "Patient {patient_id} switched to the {insurance} insurance plan; update the record.",
            vec![call("update_insurance", &["patient_id", "insurance"])],
            "{insurance}",
            vec![complication(
                "new_primary",
                vec![("doctor_id", key_where("doctors", "specialty", &["general"]))],
                "They also want doctor {doctor_id} as primary doctor.",
                vec![call("change_primary_doctor", &["patient_id", "doctor_id"])],
                "primary {doctor_id}",
            )],
        ),
        intent(
            "doctor_lookup",
            vec![
                ("patient_id", key("patients")),
                ("doctor_id", field("patient_id", "patients", "primary_doctor")),
                ("specialty", field("doctor_id", "doctors", "specialty")),
            ],
            "What specialty does the primary doctor ({doctor_id}) of patient {patient_id} practice?",
            vec![call("get_patient", &["patient_id"]), call("get_doctor", &["doctor_id"])],
            "{specialty}",
            vec![],
        ),
    ];
    let (pricing, latency) = standard_costs();
    DomainTemplate {
        domain: "medicine",
        tables,
        tools,
        pricing,
        latency,
        intents,
    }
}

fn restaurant() -> DomainTemplate {
    const TIMES: &[&str] = &["18:00", "18:30", "19:00", "19:30", "20:00", "21:00"];
    let tables = vec![
        table(
            "restaurants",
            "restaurant_id",
            "R",
            40,
            vec![
                ("name", FieldGen::Pool(&["Olive", "Saffron", "Kumo", "Brasa", "Lotus", "Nord"])),
                ("city", FieldGen::Pool(CITIES)),
                ("cuisine", FieldGen::Enum(&["italian", "indian", "japanese", "mexican", "nordic"])),
            ],
        ),
        table(
            "dining_tables",
            "table_id",
            "T",
            160,
            vec![
                ("restaurant_id", FieldGen::Ref("restaurants")),
                ("seats", FieldGen::Int(2, 8)),
                ("status", FieldGen::Enum(&["free", "occupied", "reserved"])),
            ],
        ),
        table(
            "menu_items",
            "item_id",
            "M",
            240,
            vec![
                ("restaurant_id", FieldGen::Ref("restaurants")),
                ("name", FieldGen::Pool(&["risotto", "curry", "ramen", "tacos", "salmon", "soup", "salad"])),
                ("price", FieldGen::Money(4.0, 60.0)),
                ("available", FieldGen::Bool(0.85)),
            ],
        ),
        table(
            "staff",
            "staff_id",
            "S",
            60,
            vec![
                ("restaurant_id", FieldGen::Ref("restaurants")),
                ("name", FieldGen::Person),
                ("role", FieldGen::Enum(&["chef", "waiter", "host", "manager"])),
                ("shift", FieldGen::Enum(&["morning", "evening", "night"])),
            ],
        ),
        table(
            "reservations",
            "reservation_id",
            "RS",
            183,
            vec![
                ("restaurant_id", FieldGen::Ref("restaurants")),
                ("table_id", FieldGen::Ref("dining_tables")),
                ("guest", FieldGen::Person),
                ("party_size", FieldGen::Int(1, 8)),
                ("time", FieldGen::Pool(TIMES)),
                ("status", FieldGen::Enum(&["booked", "booked", "seated", "cancelled"])),
            ],
        ),
    ];
    let tools = vec![
        get("get_restaurant", "restaurants", "restaurant_id"),
        search("find_restaurants_by_city", "restaurants", "city", s("city")),
        search("find_restaurants_by_cuisine", "restaurants", "cuisine", choice("cuisine", &["italian", "indian", "japanese", "mexican", "nordic"])),
        get("get_table", "dining_tables", "table_id"),
        search("list_restaurant_tables", "dining_tables", "restaurant_id", s("restaurant_id")),
        set_param("set_table_status", "Changes a table's status.", "dining_tables", "table_id", "status", choice("status", &["free", "occupied", "reserved"]), None),
        get("get_menu_item", "menu_items", "item_id"),
        search("list_menu", "menu_items", "restaurant_id", s("restaurant_id")),
        set_param("update_menu_price", "Changes the price of a dish.", "menu_items", "item_id", "price", n("price"), None),
        set_fixed("mark_item_unavailable", "Takes a dish off tonight's menu.", "menu_items", "item_id", "available", json!(false), &[json!(false)]),
        set_fixed("mark_item_available", "Puts a dish back on the menu.", "menu_items", "item_id", "available", json!(true), &[json!(true)]),
        insert(
            "add_menu_item",
            "Adds a dish to a restaurant's menu.",
            "menu_items",
            "item_id",
            vec![s("restaurant_id"), s("name"), n("price")],
            json!({"available": true}),
        ),
        delete("remove_menu_item", "menu_items", "item_id"),
        get("get_staff", "staff", "staff_id"),
        set_param("change_staff_shift", "Moves a staff member to another shift.", "staff", "staff_id", "shift", choice("shift", &["morning", "evening", "night"]), None),
        get("get_reservation", "reservations", "reservation_id"),
        search("find_reservations_by_guest", "reservations", "guest", s("guest")),
        insert(
            "make_reservation",
            "Creates a reservation.",
            "reservations",
            "reservation_id",
            vec![s("restaurant_id"), s("table_id"), s("guest"), n("party_size"), s("time")],
            json!({"status": "booked"}),
        ),
        set_fixed("cancel_reservation", "Cancels a reservation.", "reservations", "reservation_id", "status", json!("cancelled"), &[json!("cancelled"), json!("seated")]),
        set_fixed("seat_reservation", "Marks a party as seated.", "reservations", "reservation_id", "status", json!("seated"), &[json!("cancelled"), json!("seated")]),
        set_param("change_party_size", "Changes the party size of a reservation.", "reservations", "reservation_id", "party_size", n("party_size"), Some(("status", &[json!("cancelled")]))),
        calculator(),
        hand_off(),
    ];
    let intents = vec![
        intent(
            "reserve",
            vec![
                ("reservation_id", Binding::FreshKey { table: "reservations" }),
                ("table_id", key_where("dining_tables", "status", &["free"])),
                ("restaurant_id", field("table_id", "dining_tables", "restaurant_id")),
                ("guest", Binding::Choice(&["Iris Vale", "Marco Ruiz", "Yuki Sato", "Dana Cole"])),
                ("party_size", Binding::Amount(2, 4)),
                ("time", Binding::Choice(TIMES)),
            ],
            "Reserve table {table_id} at restaurant {restaurant_id} for {guest}, party of {party_size}, at {time}. Use reference {reservation_id}.",
            vec![call("make_reservation", &["reservation_id", "restaurant_id", "table_id", "guest", "party_size", "time"])],
            "{reservation_id} at {time}",
            vec![complication(
                "hold_table",
                vec![("status", Binding::Choice(&["reserved"]))],
                "Mark the table as reserved too.",
                vec![call("set_table_status", &["table_id", "status"])],
                "",
            )],
        ),
        intent(
            "cancel_reservation",
            vec![("reservation_id", key_where("reservations", "status", &["booked"]))],
            "Cancel reservation {reservation_id}, we can't come.",
            vec![call("cancel_reservation", &["reservation_id"])],
            "{reservation_id} cancelled",
            vec![complication(
                "free_table",
                vec![
                    ("table_id", field("reservation_id", "reservations", "table_id")),
                    ("status", Binding::Choice(&["free"])),
                ],
                "Release its table {table_id} as free.",
                vec![call("set_table_status", &["table_id", "status"])],
                "{table_id} free",
            )],
        ),
        intent(
            "party_size",
            vec![
                ("reservation_id", key_where("reservations", "status", &["booked"])),
                ("party_size", Binding::Amount(2, 8)),
            ],
            "We are now {party_size} people for reservation {reservation_id}.",
            vec![call("change_party_size", &["reservation_id", "party_size"])],
            "party of {party_size}",
            vec![],
        ),
        intent(
            "menu_price",
            vec![
                ("item_id", key("menu_items")),
                ("name", field("item_id", "menu_items", "name")),
                ("price", field("item_id", "menu_items", "price")),
            ],
            "How much does the {name} (menu item {item_id}) cost?",
            vec![call("get_menu_item", &["item_id"])],
            "{price}",
            vec![complication(
                "table_check",
                vec![
                    ("table_id", key("dining_tables")),
                    ("status", field("table_id", "dining_tables", "status")),
                ],
                "And is table {table_id} free right now?",
                vec![call("get_table", &["table_id"])],
                "table {status}",
            )],
        ),
        intent(
            "reprice",
            vec![
                ("item_id", key("menu_items")),
                ("price", Binding::Amount(8, 45)),
            ],
            "Set the price of menu item {item_id} to {price}.",
            vec![call("update_menu_price", &["item_id", "price"])],
            "now {price}",
            vec![],
        ),
        intent(
            "new_dish",
            vec![
                ("item_id", Binding::FreshKey { table: "menu_items" }),
                ("restaurant_id", key("restaurants")),
                ("name", Binding::Choice(&["gnocchi", "bibimbap", "paella", "pho"])),
                ("price", Binding::Amount(9, 30)),
            ],
            "Add {name} at {price} to the menu of restaurant {restaurant_id} as item {item_id}.",
            vec![call("add_menu_item", &["item_id", "restaurant_id", "name", "price"])],
            "{item_id} added",
            vec![],
        ),
        intent(
            "shift_change",
            vec![
                ("staff_id", key("staff")),
                ("shift", Binding::Choice(&["morning", "evening", "night"])),
                ("name", field("staff_id", "staff", "name")),
            ],
            "Put {name} ({staff_id}) on the {shift} shift.",
            vec![call("change_staff_shift", &["staff_id", "shift"])],
            "{shift} shift",
            vec![],
        ),
    ];
    let (pricing, latency) = standard_costs();
    DomainTemplate {
        domain: "restaurant",
        tables,
        tools,
        pricing,
        latency,
        intents,
    }
}

fn travel() -> DomainTemplate {
    let tables = vec![
        table(
            "users",
            "user_id",
            "U",
            150,
            vec![
                ("name", FieldGen::Person),
                ("membership", FieldGen::Enum(&["regular", "silver", "gold"])),
                ("travel_credit", FieldGen::Money(0.0, 800.0)),
            ],
        ),
        table(
            "flights",
            "flight_id",
            "F",
            200,
            vec![
                ("origin", FieldGen::Pool(CITIES)),
                ("destination", FieldGen::Pool(CITIES)),
                ("date", FieldGen::Date),
                ("seats_left", FieldGen::Int(0, 180)),
                ("status", FieldGen::Enum(&["on_time", "on_time", "delayed", "cancelled"])),
            ],
        ),
        table(
            "hotels",
            "hotel_id",
            "H",
            102,
            vec![
                ("city", FieldGen::Pool(CITIES)),
                ("name", FieldGen::Pool(&["Harbor Inn", "Grand Plaza", "Cedar Lodge", "Metro Suites"])),
                ("nightly_rate", FieldGen::Money(60.0, 450.0)),
            ],
        ),
        table(
            "bookings",
            "booking_id",
            "B",
            300,
            vec![
                ("user_id", FieldGen::Ref("users")),
                ("flight_id", FieldGen::Ref("flights")),
                ("cabin", FieldGen::Enum(&["economy", "economy", "business"])),
                ("status", FieldGen::Enum(&["confirmed", "confirmed", "cancelled"])),
            ],
        ),
    ];
    let tools = vec![
        get("get_user_details", "users", "user_id"),
        get("get_flight_status", "flights", "flight_id"),
        search("search_flights_by_origin", "flights", "origin", s("origin")),
        get("get_booking", "bookings", "booking_id"),
        search("list_user_bookings", "bookings", "user_id", s("user_id")),
        insert(
            "book_flight",
            "Books a seat on a flight.",
            "bookings",
            "booking_id",
            vec![s("user_id"), s("flight_id"), choice("cabin", &["economy", "business"])],
            json!({"status": "confirmed"}),
        ),
        set_fixed("cancel_booking", "Cancels a booking.", "bookings", "booking_id", "status", json!("cancelled"), &[json!("cancelled")]),
        set_param("change_flight", "Moves a booking to another flight.", "bookings", "booking_id", "flight_id", s("flight_id"), Some(("status", &[json!("cancelled")]))),
        set_fixed("upgrade_cabin", "Upgrades a booking to business class.", "bookings", "booking_id", "cabin", json!("business"), &[json!("business")]),
        adjust("add_travel_credit", "Credits a user's travel balance.", "users", "user_id", "travel_credit", "amount", 1.0),
        adjust("use_travel_credit", "Spends travel credit.", "users", "user_id", "travel_credit", "amount", -1.0),
        get("get_hotel", "hotels", "hotel_id"),
        search("search_hotels_by_city", "hotels", "city", s("city")),
        calculator(),
        hand_off(),
    ];
    let intents = vec![
        intent(
            "cancel_trip",
            vec![("booking_id", key_where("bookings", "status", &["confirmed"]))],
            "Please cancel booking {booking_id}.",
            vec![call("cancel_booking", &["booking_id"])],
            "{booking_id} cancelled",
            vec![complication(
                "compensate",
                vec![
                    ("user_id", field("booking_id", "bookings", "user_id")),
                    ("amount", Binding::Amount(25, 150)),
                ],
                "Give user {user_id} {amount} dollars of travel credit for the trouble.",
                vec![call("add_travel_credit", &["user_id", "amount"])],
                "{amount} credit",
            )],
        ),
        intent(
            "flight_status",
            vec![
                ("flight_id", key("flights")),
                ("status", field("flight_id", "flights", "status")),
                ("destination", field("flight_id", "flights", "destination")),
            ],
            "Is flight {flight_id} on time? Where does it go?",
            vec![call("get_flight_status", &["flight_id"])],
            "{status} to {destination}",
            vec![],
        ),
        intent(
            "book",
            vec![
                ("booking_id", Binding::FreshKey { table: "bookings" }),
                ("user_id", key("users")),
                ("flight_id", key_where("flights", "status", &["on_time", "delayed"])),
                ("cabin", Binding::Choice(&["economy", "business"])),
            ],
            "Book user {user_id} in {cabin} on flight {flight_id} with reference {booking_id}.",
            vec![call("book_flight", &["booking_id", "user_id", "flight_id", "cabin"])],
            "{booking_id} confirmed",
            vec![],
        ),
        intent(
            "change_flight",
            vec![
                ("booking_id", key_where("bookings", "status", &["confirmed"])),
                ("flight_id", key_where("flights", "status", &["on_time"])),
            ],
            "Move booking {booking_id} to flight {flight_id}.",
            vec![call("change_flight", &["booking_id", "flight_id"])],
            "now on {flight_id}",
            vec![complication(
                "upgrade",
                vec![],
                "And upgrade it to business class if it is not already.",
                vec![call("upgrade_cabin", &["booking_id"])],
                "business",
            )],
        ),
        intent(
            "hotel_rate",
            vec![
                ("hotel_id", key("hotels")),
                ("rate", field("hotel_id", "hotels", "nightly_rate")),
                ("user_id", key("users")),
                ("membership", field("user_id", "users", "membership")),
            ],
            "What is the nightly rate at hotel {hotel_id}, and what membership level does user {user_id} hold?",
            vec![call("get_hotel", &["hotel_id"]), call("get_user_details", &["user_id"])],
            "{rate} per night, {membership} member",
            vec![],
        ),
        intent(
            "spend_credit",
            vec![
                ("user_id", key("users")),
                ("amount", Binding::AmountUpTo { of: "user_id", table: "users", field: "travel_credit" }),
                ("left", after("user_id", "users", "travel_credit")),
            ],
            "User {user_id} wants to spend {amount} dollars of travel credit. How much remains?",
            vec![call("use_travel_credit", &["user_id", "amount"])],
            "{left} remaining",
            vec![],
        ),
    ];
    let (pricing, latency) = standard_costs();
    DomainTemplate {
        domain: "travel",
        tables,
        tools,
        pricing,
        latency,
        intents,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tool_and_entry_counts_match_targets() {
        let expected = [
            ("finance", 22, 686),
            ("ecommerce", 15, 577),
            ("medicine", 19, 920),
            ("restaurant", 23, 683),
            ("travel", 15, 752),
        ];
        for (domain, tools, entries) in expected {
            let t = domain_template(domain).unwrap();
            t.check().unwrap();
            assert_eq!(t.tools.len(), tools, "{domain}");
            assert_eq!(t.tables.iter().map(|t| t.default_size).sum::<usize>(), entries, "{domain}");
        }
    }
}
