#pragma once

#include <string>

#include <json.hpp>

#include "metadist/domain_json.hpp"
#include "metadist/graph.hpp"

namespace metadist::testing {

/// The two-optimizer MLP domain used across the test suites: a categorical
/// optimizer choosing between two hyperparameter groups, a layer count that
/// depends on the optimizer and controls how many unit counts exist, and a
/// free learning rate.
inline GraphSpec mlp_example_spec() {
  const char* text = R"json({
    "variables": [
      {"name": "r",  "kind": "cont", "universal": {"interval": [0,1], "open": [true,true]}, "excludable": false},
      {"name": "o",  "kind": "cat",  "universal": {"cats": ["ASGD","ADAM"]}, "excludable": false},
      {"name": "l",  "kind": "int",  "universal": {"range": [0,2]}, "excludable": false},
      {"name": "alpha", "kind": "cont", "universal": {"interval": [0,1], "open": [true,true]}, "excludable": true},
      {"name": "beta",  "kind": "cont", "universal": {"interval": [0,1], "open": [true,true]}, "excludable": true},
      {"name": "u1", "kind": "int", "universal": {"range": [10,300]}, "excludable": true},
      {"name": "u2", "kind": "int", "universal": {"range": [25,300]}, "excludable": true}
    ],
    "arcs": [
      {"parent": "o", "child": "l",  "kind": "values"},
      {"parent": "o", "child": "alpha", "kind": "inclusion"},
      {"parent": "o", "child": "beta",  "kind": "inclusion"},
      {"parent": "o", "child": "u1", "kind": "values"},
      {"parent": "o", "child": "u2", "kind": "values"},
      {"parent": "l", "child": "u1", "kind": "inclusion"},
      {"parent": "l", "child": "u2", "kind": "inclusion"}
    ],
    "rules": [
      {"child": "l", "cases": [
        {"when": {"o": {"cats": ["ASGD"]}}, "set": {"ints": [0,1]}},
        {"when": {"o": {"cats": ["ADAM"]}}, "set": {"ints": [0,1,2]}}
      ]},
      {"child": "alpha", "cases": [
        {"when": {"o": {"cats": ["ASGD"]}}, "set": {"interval": [0,1], "open": [true,true]}},
        {"when": {"o": {"cats": ["ADAM"]}}, "set": "EXC"}
      ]},
      {"child": "beta", "cases": [
        {"when": {"o": {"cats": ["ADAM"]}}, "set": {"interval": [0,1], "open": [true,true]}},
        {"when": {"o": {"cats": ["ASGD"]}}, "set": "EXC"}
      ]},
      {"child": "u1", "cases": [
        {"when": {"o": {"cats": ["ASGD"]}, "l": {"ints": [1,2]}}, "set": {"range": [10,200]}},
        {"when": {"o": {"cats": ["ADAM"]}, "l": {"ints": [1,2]}}, "set": {"range": [25,300]}},
        {"when": {"l": {"ints": [0]}}, "set": "EXC"}
      ]},
      {"child": "u2", "cases": [
        {"when": {"o": {"cats": ["ADAM"]}, "l": {"ints": [2]}}, "set": {"range": [25,300]}},
        {"when": {"o": {"cats": ["ASGD"]}, "l": {"ints": [2]}}, "set": "EXC"},
        {"when": {"l": {"ints": [0,1]}}, "set": "EXC"}
      ]}
    ]
  })json";
  return graph_spec_from_json(nlohmann::json::parse(text));
}

inline RoleGraph mlp_example() { return RoleGraph::build(mlp_example_spec()); }

/// Three isolated variables, no arcs.
inline RoleGraph arcless_example() {
  const char* text = R"json({
    "variables": [
      {"name": "x", "kind": "cont", "universal": {"interval": [0,1]}, "excludable": false},
      {"name": "n", "kind": "int",  "universal": {"range": [0,9]}, "excludable": false},
      {"name": "c", "kind": "cat",  "universal": {"cats": ["a","b","c"]}, "excludable": false}
    ]
  })json";
  return RoleGraph::build(graph_spec_from_json(nlohmann::json::parse(text)));
}

}  // namespace metadist::testing
