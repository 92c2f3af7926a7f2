#include "lmcma/objectives.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "lmcma/error.hpp"
#include "lmcma/random.hpp"

namespace lmcma {

FunctionId parse_function(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "sphere") return FunctionId::Sphere;
    if (lower == "rastrigin") return FunctionId::Rastrigin;
    if (lower == "rosenbrock") return FunctionId::Rosenbrock;
    if (lower == "ellipsoid") return FunctionId::Ellipsoid;
    throw ContractError("unknown function '" + std::string(name) + "'");
}

std::string_view function_name(FunctionId id) {
    switch (id) {
        case FunctionId::Sphere: return "sphere";
        case FunctionId::Rastrigin: return "rastrigin";
        case FunctionId::Rosenbrock: return "rosenbrock";
        case FunctionId::Ellipsoid: return "ellipsoid";
    }
    return "unknown";
}

double sphere(std::span<const double> x) {
    double sum = 0.0;
    for (double xi : x) sum += xi * xi;
    return sum;
}

double rastrigin(std::span<const double> x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double sum = 10.0 * static_cast<double>(x.size());
    for (double xi : x) sum += xi * xi - 10.0 * std::cos(two_pi * xi);
    return sum;
}

double rosenbrock(std::span<const double> x) {
    detail::require(x.size() >= 2, "rosenbrock: dimension must be at least 2");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double valley = x[i + 1] - x[i] * x[i];
        const double offset = 1.0 - x[i];
        sum += 100.0 * valley * valley + offset * offset;
    }
    return sum;
}

double ellipsoid(std::span<const double> x) {
    double prefix = 0.0;
    double sum = 0.0;
    for (double xi : x) {
        prefix += xi;
        sum += prefix * prefix;
    }
    return sum;
}

double evaluate(FunctionId id, std::span<const double> x) {
    switch (id) {
        case FunctionId::Sphere: return sphere(x);
        case FunctionId::Rastrigin: return rastrigin(x);
        case FunctionId::Rosenbrock: return rosenbrock(x);
        case FunctionId::Ellipsoid: return ellipsoid(x);
    }
    throw ContractError("evaluate: unknown function id");
}

bool is_valid_complexity(std::size_t vertices) {
    return std::find(std::begin(kComplexityLevels), std::end(kComplexityLevels), vertices) !=
           std::end(kComplexityLevels);
}

void ObjectiveSpec::validate() const {
    detail::require(n >= 2, "ObjectiveSpec: dimension must be at least 2");
    detail::require(is_valid_complexity(complexity),
                    "ObjectiveSpec: complexity must be one of 0, 200, 400, 600");
}

ComplexityGraph make_graph(std::size_t vertex_count, std::uint64_t graph_seed,
                           std::size_t edge_count) {
    detail::require(vertex_count >= 2, "make_graph: need at least two vertices");
    Rng rng(derive_seed(graph_seed, {vertex_count}));
    std::uniform_int_distribution<std::uint32_t> endpoint(
        0, static_cast<std::uint32_t>(vertex_count - 1));

    ComplexityGraph graph;
    graph.vertex_count = vertex_count;
    graph.edges.reserve(edge_count);
    for (std::size_t k = 0; k < edge_count; ++k) {
        Edge edge;
        edge.from = endpoint(rng);
        edge.to = endpoint(rng);
        edge.weight = uniform01(rng);
        graph.edges.push_back(edge);
    }
    return graph;
}

std::vector<double> bellman_ford(const ComplexityGraph& graph, std::size_t source) {
    detail::require(source < graph.vertex_count, "bellman_ford: source out of range");
    constexpr double infinity = std::numeric_limits<double>::infinity();
    std::vector<double> distance(graph.vertex_count, infinity);
    distance[source] = 0.0;
    // No early exit: every call does the same amount of work.
    for (std::size_t round = 1; round < graph.vertex_count; ++round) {
        for (const auto& edge : graph.edges) {
            const double via = distance[edge.from] + edge.weight;
            if (via < distance[edge.to]) distance[edge.to] = via;
        }
    }
    return distance;
}

Objective wrap_with_complexity(Objective f, std::shared_ptr<const ComplexityGraph> graph) {
    if (!graph) return f;
    return [f = std::move(f), graph = std::move(graph)](std::span<const double> x) {
        const double value = f(x);
        const auto distance = bellman_ford(*graph, 0);
        double checksum = 0.0;
        for (double d : distance) {
            if (std::isfinite(d)) checksum += d;
        }
        // 0.0 * finite checksum is +0.0, so value is unchanged bit for bit.
        return value + 0.0 * checksum;
    };
}

Objective make_objective(const ObjectiveSpec& spec) {
    spec.validate();
    const FunctionId id = spec.function;
    Objective plain = [id](std::span<const double> x) { return evaluate(id, x); };
    std::shared_ptr<const ComplexityGraph> graph;
    if (spec.complexity > 0) {
        graph = std::make_shared<const ComplexityGraph>(make_graph(spec.complexity, spec.graph_seed));
    }
    return wrap_with_complexity(std::move(plain), std::move(graph));
}

}  // namespace lmcma
