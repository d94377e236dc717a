//! Structural rules recognizing the five external-data interaction
//! strategies. Each rule is anchored to the syntactic skeleton of a
//! canonical example contract (see `fixtures/listings/`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ast::{AstNode, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyLabel {
    CentralizedOracle,
    DecentralizedOracle,
    Sidechain,
    CrossChainBridge,
    #[serde(rename = "ZKP")]
    Zkp,
}

impl StrategyLabel {
    pub const ALL: [StrategyLabel; 5] = [
        StrategyLabel::CentralizedOracle,
        StrategyLabel::DecentralizedOracle,
        StrategyLabel::Sidechain,
        StrategyLabel::CrossChainBridge,
        StrategyLabel::Zkp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyLabel::CentralizedOracle => "CentralizedOracle",
            StrategyLabel::DecentralizedOracle => "DecentralizedOracle",
            StrategyLabel::Sidechain => "Sidechain",
            StrategyLabel::CrossChainBridge => "CrossChainBridge",
            StrategyLabel::Zkp => "ZKP",
        }
    }
}

impl std::fmt::Display for StrategyLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Applies every strategy rule to one contract, interface or library.
pub fn classify_strategies(contract: &AstNode) -> BTreeSet<StrategyLabel> {
    let view = ContractView::new(contract);
    let mut labels = BTreeSet::new();
    if view.centralized_oracle() {
        labels.insert(StrategyLabel::CentralizedOracle);
    }
    if view.decentralized_oracle() {
        labels.insert(StrategyLabel::DecentralizedOracle);
    }
    if view.sidechain() {
        labels.insert(StrategyLabel::Sidechain);
    }
    if view.cross_chain_bridge() {
        labels.insert(StrategyLabel::CrossChainBridge);
    }
    if view.zkp() {
        labels.insert(StrategyLabel::Zkp);
    }
    labels
}

struct ContractView<'a> {
    contract: &'a AstNode,
    state_vars: Vec<&'a AstNode>,
    functions: Vec<&'a AstNode>,
    modifiers: Vec<&'a AstNode>,
    events: Vec<&'a AstNode>,
}

fn lower(s: Option<&str>) -> String {
    s.unwrap_or_default().to_lowercase()
}

fn is_msg_sender(node: &AstNode) -> bool {
    node.is_named(NodeKind::MemberAccess, "sender")
        && node
            .children
            .first()
            .is_some_and(|c| c.is_named(NodeKind::Identifier, "msg"))
}

/// `msg.sender == v` or `v != msg.sender` anywhere under `node`, for `v` in `vars`.
fn compares_sender_to(node: &AstNode, vars: &[&str]) -> bool {
    node.walk().any(|n| {
        n.kind == NodeKind::BinaryOp
            && matches!(n.name(), Some("==" | "!="))
            && n.children.len() == 2
            && {
                let (l, r) = (&n.children[0], &n.children[1]);
                let names_var = |x: &AstNode| {
                    x.kind == NodeKind::Identifier && x.name().is_some_and(|v| vars.contains(&v))
                };
                (is_msg_sender(l) && names_var(r)) || (is_msg_sender(r) && names_var(l))
            }
    })
}

fn is_state_mutating(function: &AstNode) -> bool {
    !function.has_attribute("view") && !function.has_attribute("pure")
}

/// `m[msg.sender]`.
fn is_sender_slot(node: &AstNode, mapping: &str) -> bool {
    node.kind == NodeKind::IndexAccess
        && node.children.len() == 2
        && node.children[0].is_named(NodeKind::Identifier, mapping)
        && is_msg_sender(&node.children[1])
}

/// `m[msg.sender] += x`, `m[msg.sender] = m[msg.sender] + x` or `m[msg.sender]++`.
fn increments_sender_slot(body: &AstNode, mapping: &str) -> bool {
    body.walk().any(|n| match n.kind {
        NodeKind::Assignment
            if n.children.len() == 2 && is_sender_slot(&n.children[0], mapping) =>
        {
            match n.name() {
                Some("+=") => true,
                Some("=") => {
                    let rhs = &n.children[1];
                    rhs.is_named(NodeKind::BinaryOp, "+")
                        && rhs.children.iter().any(|c| is_sender_slot(c, mapping))
                }
                _ => false,
            }
        }
        NodeKind::UnaryOp if matches!(n.name(), Some("++" | "++post")) => n
            .children
            .first()
            .is_some_and(|c| is_sender_slot(c, mapping)),
        _ => false,
    })
}

/// The root variable an assignment target writes to: `x`, `x[i]`, `x.f`.
fn assigned_root(target: &AstNode) -> Option<&str> {
    match target.kind {
        NodeKind::Identifier => target.name(),
        NodeKind::IndexAccess | NodeKind::MemberAccess => {
            target.children.first().and_then(assigned_root)
        }
        _ => None,
    }
}

/// Identifiers appearing in type position under `node`.
fn type_reference_names(node: &AstNode) -> Vec<&str> {
    let mut out = Vec::new();
    for n in node.walk() {
        match n.kind {
            NodeKind::ParamDecl | NodeKind::StateVarDecl => {
                if let Some(ty) = n.declared_type() {
                    out.extend(
                        ty.walk()
                            .filter(|t| {
                                matches!(t.kind, NodeKind::Identifier | NodeKind::MemberAccess)
                            })
                            .filter_map(|t| t.name()),
                    );
                }
            }
            NodeKind::FunctionCall => {
                // Explicit conversions such as `IFeed(addr)`.
                if let Some(callee) = n
                    .children
                    .first()
                    .filter(|c| c.kind == NodeKind::Identifier)
                {
                    out.extend(callee.name());
                }
            }
            NodeKind::Other if n.name() == Some("inheritance") => {
                out.extend(
                    n.walk()
                        .skip(1)
                        .filter(|t| t.kind == NodeKind::Identifier)
                        .filter_map(|t| t.name()),
                );
            }
            _ => {}
        }
    }
    out
}

impl<'a> ContractView<'a> {
    fn new(contract: &'a AstNode) -> Self {
        let members = |kind: NodeKind| {
            contract
                .children
                .iter()
                .filter(|c| c.kind == kind)
                .collect::<Vec<_>>()
        };
        Self {
            contract,
            state_vars: members(NodeKind::StateVarDecl),
            functions: members(NodeKind::FunctionDef),
            modifiers: members(NodeKind::ModifierDef),
            events: members(NodeKind::EventDef),
        }
    }

    fn address_state_vars(&self) -> Vec<&'a str> {
        self.state_vars
            .iter()
            .filter(|v| {
                v.declared_type().is_some_and(|t| {
                    t.kind == NodeKind::ElementaryType
                        && t.name().is_some_and(|n| n.starts_with("address"))
                })
            })
            .filter_map(|v| v.name())
            .collect()
    }

    fn state_var_names(&self) -> Vec<&'a str> {
        self.state_vars.iter().filter_map(|v| v.name()).collect()
    }

    /// A sender-gated modifier guarding a state-mutating function, or an
    /// oracle-named state variable gating a setter.
    fn centralized_oracle(&self) -> bool {
        let addresses = self.address_state_vars();
        let guarded_by = |modifier: &str| {
            self.functions
                .iter()
                .any(|f| is_state_mutating(f) && f.modifier_invocations().any(|m| m == modifier))
        };
        let gated_modifier = self.modifiers.iter().any(|m| {
            let Some(body) = m.body() else { return false };
            let checks_sender = body
                .walk()
                .any(|n| n.kind == NodeKind::RequireCall && compares_sender_to(n, &addresses));
            checks_sender && m.name().is_some_and(guarded_by)
        });
        if gated_modifier {
            return true;
        }

        let oracle_vars: Vec<&str> = self
            .state_vars
            .iter()
            .filter_map(|v| v.name())
            .filter(|n| n.to_lowercase().contains("oracle"))
            .collect();
        if oracle_vars.is_empty() {
            return false;
        }
        let state = self.state_var_names();
        self.functions
            .iter()
            .filter(|f| is_state_mutating(f))
            .any(|f| {
                let Some(body) = f.body() else { return false };
                let gated = body.walk().any(|n| match n.kind {
                    NodeKind::RequireCall => compares_sender_to(n, &oracle_vars),
                    NodeKind::IfStmt => n
                        .children
                        .first()
                        .is_some_and(|c| compares_sender_to(c, &oracle_vars)),
                    _ => false,
                });
                let writes_state = body.walk().any(|n| {
                    n.kind == NodeKind::Assignment
                        && n.children
                            .first()
                            .and_then(assigned_root)
                            .is_some_and(|r| state.contains(&r))
                });
                gated && writes_state
            })
    }

    /// Calls `latestRoundData`, or references an aggregator type.
    fn decentralized_oracle(&self) -> bool {
        let calls_feed = self.contract.walk().any(|n| {
            n.kind == NodeKind::FunctionCall
                && n.children
                    .first()
                    .is_some_and(|c| c.is_named(NodeKind::MemberAccess, "latestRoundData"))
        });
        calls_feed
            || type_reference_names(self.contract)
                .iter()
                .any(|n| n.to_lowercase().contains("aggregator"))
    }

    /// Events carrying a chain-named parameter.
    fn chain_events(&self) -> Vec<&'a str> {
        self.events
            .iter()
            .filter(|e| e.params().any(|p| lower(p.name()).contains("chain")))
            .filter_map(|e| e.name())
            .collect()
    }

    fn is_lock_function(f: &AstNode) -> bool {
        lower(f.name()).contains("lock")
    }

    /// A lock function that emits one of the given events.
    fn emits_any(f: &AstNode, events: &[&str]) -> bool {
        f.body().is_some_and(|b| {
            b.walk().any(|n| {
                n.kind == NodeKind::EmitStmt && n.name().is_some_and(|e| events.contains(&e))
            })
        })
    }

    /// A `locked*` mapping credited to the sender by a lock function that
    /// does not announce a target chain.
    fn sidechain(&self) -> bool {
        let locked: Vec<&str> = self
            .state_vars
            .iter()
            .filter(|v| {
                v.declared_type()
                    .is_some_and(|t| t.kind == NodeKind::MappingType)
            })
            .filter_map(|v| v.name())
            .filter(|n| n.to_lowercase().contains("locked"))
            .collect();
        let chain_events = self.chain_events();
        self.functions
            .iter()
            .filter(|f| Self::is_lock_function(f) && !Self::emits_any(f, &chain_events))
            .any(|f| {
                f.body()
                    .is_some_and(|b| locked.iter().any(|m| increments_sender_slot(b, m)))
            })
    }

    /// Lock-and-emit toward a named chain, or a bridge/cross-chain name.
    fn cross_chain_bridge(&self) -> bool {
        let chain_events = self.chain_events();
        let lock_and_emit = self
            .functions
            .iter()
            .any(|f| Self::is_lock_function(f) && Self::emits_any(f, &chain_events));
        if lock_and_emit {
            return true;
        }
        std::iter::once(self.contract)
            .chain(self.contract.children.iter())
            .filter(|n| {
                matches!(
                    n.kind,
                    NodeKind::ContractDef
                        | NodeKind::InterfaceDef
                        | NodeKind::LibraryDef
                        | NodeKind::FunctionDef
                        | NodeKind::ModifierDef
                        | NodeKind::EventDef
                        | NodeKind::StateVarDecl
                )
            })
            .map(|n| lower(n.name()))
            .any(|n| n.contains("bridge") || n.contains("crosschain"))
    }

    /// A `verifyProof`-style entry point, or `verify(bytes proof, ...)`.
    fn zkp(&self) -> bool {
        self.functions.iter().any(|f| {
            let name = lower(f.name());
            if name.contains("verifyproof") {
                return true;
            }
            name == "verify"
                && f.params().any(|p| {
                    lower(p.name()).contains("proof")
                        && p.declared_type()
                            .is_some_and(|t| t.is_named(NodeKind::ElementaryType, "bytes"))
                })
        })
    }
}
