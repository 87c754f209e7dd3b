"""Topology and weight evolution with historical markings and speciation.

Genomes are lists of node and connection genes.  Every structural
addition (a new connection between a source/target pair, or a node
splitting a connection) is tagged with a run-global innovation number so
that genomes of different shapes stay alignable for crossover and
compatibility measurement.  The population is partitioned into species
by compatibility distance, fitness is shared within species, and
reproduction is a (N, N) evolution strategy with per-species champion
elitism: offspring quotas are proportional to species' total adjusted
fitness, parents come from each species' top fraction, and all parents
are discarded each generation except duplicated champions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from spikeneat.snn import CodecConfig, SigmoidNetwork, SpikingNetwork

NODE_ROLES = ("input", "hidden", "output")
GENOME_KINDS = ("spiking", "sigmoid")

# Weight of a structural connection at creation time, matching the
# minimal-genome initialization range.
_NEW_WEIGHT_RANGE = 1.0

# Attempts to find an unconnected (source, target) pair before giving up.
_ADD_CONN_TRIES = 30


@dataclass
class NodeGene:
    """One network node: identity, layer role and phenotype kind."""

    id: int
    role: str
    kind: str

    def copy(self) -> "NodeGene":
        return NodeGene(self.id, self.role, self.kind)


@dataclass
class ConnectionGene:
    """One directed weighted edge tagged with its historical marking."""

    innovation: int
    source: int
    target: int
    weight: float
    enabled: bool = True

    def copy(self) -> "ConnectionGene":
        return ConnectionGene(self.innovation, self.source, self.target, self.weight, self.enabled)


@dataclass
class Genome:
    """A network blueprint plus its decoder gene and scores.

    Attributes:
        nodes: Node genes, unique ids.
        connections: Connection genes sorted ascending by innovation.
        sigma: Readout steepness gene (> 0), meaningful for spiking genomes.
        fitness: Raw score; None until evaluated.
        adjusted_fitness: Species-shared score; None until shared.
        gid: Serial number for serialization and logs.
    """

    nodes: list[NodeGene]
    connections: list[ConnectionGene]
    sigma: float = 1.0
    fitness: float | None = None
    adjusted_fitness: float | None = None
    gid: int = 0

    @property
    def kind(self) -> str:
        return self.nodes[0].kind if self.nodes else "spiking"

    def copy(self) -> "Genome":
        return Genome(
            nodes=[n.copy() for n in self.nodes],
            connections=[c.copy() for c in self.connections],
            sigma=self.sigma,
            fitness=self.fitness,
            adjusted_fitness=self.adjusted_fitness,
            gid=self.gid,
        )

    def max_innovation(self) -> int:
        return self.connections[-1].innovation if self.connections else -1


@dataclass
class Species:
    """A niche of compatible genomes.

    ``representative`` is a snapshot used for assignment; ``members`` is
    rebuilt every generation.
    """

    id: int
    representative: Genome
    members: list[Genome] = field(default_factory=list)
    best_fitness_ever: float = -math.inf
    staleness: int = 0


class Innovations:
    """Run-global registry of structural innovations.

    The same (source, target) connection always maps to the same
    innovation number, and splitting the same connection always yields
    the same new node id, so independently mutated genomes stay
    alignable.  Lookup precedes allocation.
    """

    def __init__(self, next_node: int = 0, next_innovation: int = 0) -> None:
        self.conn_ids: dict[tuple[int, int], int] = {}
        self.split_ids: dict[tuple[int, int], int] = {}
        self.next_node = next_node
        self.next_innovation = next_innovation

    def connection(self, source: int, target: int) -> int:
        """Innovation number for the (source, target) connection."""
        key = (source, target)
        if key not in self.conn_ids:
            self.conn_ids[key] = self.next_innovation
            self.next_innovation += 1
        return self.conn_ids[key]

    def split_node(self, source: int, target: int) -> int:
        """Node id created by splitting the (source, target) connection."""
        key = (source, target)
        if key not in self.split_ids:
            self.split_ids[key] = self.fresh_node()
        return self.split_ids[key]

    def fresh_node(self) -> int:
        node = self.next_node
        self.next_node += 1
        return node

    def reserve_nodes(self, count: int) -> None:
        """Ensures ids below ``count`` are never handed out again."""
        self.next_node = max(self.next_node, count)


@dataclass
class Population:
    """All genomes of one run plus speciation and innovation bookkeeping."""

    genomes: list[Genome]
    species: list[Species] = field(default_factory=list)
    innovations: Innovations = field(default_factory=Innovations)
    generation: int = 0
    next_species_id: int = 1
    next_gid: int = 0


@dataclass(frozen=True)
class EvolutionConfig:
    """Speciation, mutation and reproduction knobs.

    Attributes:
        population_size: Genomes per generation.
        c1: Excess-gene coefficient of the compatibility distance.
        c2: Disjoint-gene coefficient.
        c3: Mean-weight-difference coefficient.
        c4: Sigma-difference coefficient (augmented distance only).
        delta_t: Speciation threshold.
        use_sigma: Include the sigma term in compatibility.
        p_add_node: Per-genome node insertion probability.
        p_add_conn: Per-genome connection addition probability.
        p_weight: Per-genome probability of the weight-mutation pass.
        p_weight_replace: Per-connection chance of full replacement
            (otherwise the weight is perturbed).
        weight_perturb: Perturbation half-range.
        weight_limit: Weights live in [-weight_limit, weight_limit].
        p_sigma: Sigma mutation probability (spiking genomes).
        sigma_step: Half-range of the log-space sigma step.
        sigma_min: Lower sigma clamp.
        sigma_max: Upper sigma clamp.
        p_crossover: Chance an offspring comes from two parents
            (otherwise a single parent is cloned) before mutation.
        parent_fraction: Top fraction of each species allowed to breed.
        elite_species_size: Champion duplication applies to species with
            strictly more members than this.
        staleness_limit: Generations without improvement after which a
            species stops receiving quota (champion species exempt).
    """

    population_size: int = 150
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 0.4
    c4: float = 1.0
    delta_t: float = 3.0
    use_sigma: bool = False
    p_add_node: float = 0.03
    p_add_conn: float = 0.1
    p_weight: float = 0.8
    p_weight_replace: float = 0.1
    weight_perturb: float = 0.5
    weight_limit: float = 8.0
    p_sigma: float = 0.2
    sigma_step: float = 0.2
    sigma_min: float = 0.05
    sigma_max: float = 20.0
    p_crossover: float = 0.75
    parent_fraction: float = 0.2
    elite_species_size: int = 5
    staleness_limit: int = 15

    @property
    def coeffs(self) -> tuple[float, float, float, float]:
        return (self.c1, self.c2, self.c3, self.c4)


def minimal_genome(
    n_inputs: int,
    n_outputs: int,
    kind: str,
    rng: np.random.Generator,
    innovations: Innovations,
) -> Genome:
    """Builds a fully input-to-output connected genome with no hidden nodes.

    Input nodes take ids 0..n_inputs-1 and outputs the next ids; weights
    are uniform in [-1, 1] and sigma starts at 1.0.

    Raises:
        ValueError: If either arity is below 1 or the kind is unknown.
    """
    if n_inputs < 1 or n_outputs < 1:
        raise ValueError("need at least one input and one output node")
    if kind not in GENOME_KINDS:
        raise ValueError(f"unknown genome kind {kind!r}")
    innovations.reserve_nodes(n_inputs + n_outputs)
    nodes = [NodeGene(i, "input", kind) for i in range(n_inputs)]
    nodes += [NodeGene(n_inputs + j, "output", kind) for j in range(n_outputs)]
    connections = []
    for i in range(n_inputs):
        for j in range(n_outputs):
            target = n_inputs + j
            connections.append(
                ConnectionGene(
                    innovation=innovations.connection(i, target),
                    source=i,
                    target=target,
                    weight=rng.uniform(-1.0, 1.0),
                )
            )
    connections.sort(key=lambda c: c.innovation)
    return Genome(nodes=nodes, connections=connections, sigma=1.0)


def compatibility(
    a: Genome,
    b: Genome,
    coeffs: tuple[float, float, float, float],
    use_sigma: bool = False,
) -> float:
    """Compatibility distance between two genomes.

    delta = c1 E / N + c2 D / N + c3 Wbar (+ c4 |sigma_a - sigma_b|)
    where E counts excess genes (innovations beyond the other genome's
    maximum), D counts disjoint genes (non-matching within range), Wbar
    is the mean absolute weight difference over matching genes, and N is
    the connection count of the larger genome (at least 1).
    """
    c1, c2, c3, c4 = coeffs
    ca, cb = a.connections, b.connections
    ia = ib = 0
    matching = 0
    weight_diff = 0.0
    disjoint = 0
    while ia < len(ca) and ib < len(cb):
        ga, gb = ca[ia], cb[ib]
        if ga.innovation == gb.innovation:
            matching += 1
            weight_diff += abs(ga.weight - gb.weight)
            ia += 1
            ib += 1
        elif ga.innovation < gb.innovation:
            disjoint += 1
            ia += 1
        else:
            disjoint += 1
            ib += 1
    excess = (len(ca) - ia) + (len(cb) - ib)
    n = max(len(ca), len(cb), 1)
    wbar = weight_diff / matching if matching else 0.0
    delta = c1 * excess / n + c2 * disjoint / n + c3 * wbar
    if use_sigma:
        delta += c4 * abs(a.sigma - b.sigma)
    return delta


def speciate(
    pop: Population,
    delta_t: float,
    coeffs: tuple[float, float, float, float],
    use_sigma: bool = False,
) -> Population:
    """Partitions the population into species by compatibility.

    Each genome joins the first existing species (in creation order)
    whose representative lies strictly within delta_t, else founds a new
    species.  Afterwards empty species are dropped and representatives
    are re-sampled as each species' first assigned member, snapshotted
    for the next generation's assignment.
    """
    for sp in pop.species:
        sp.members = []
    for genome in pop.genomes:
        for sp in pop.species:
            if compatibility(genome, sp.representative, coeffs, use_sigma) < delta_t:
                sp.members.append(genome)
                break
        else:
            sp = Species(id=pop.next_species_id, representative=genome.copy())
            sp.members.append(genome)
            pop.species.append(sp)
            pop.next_species_id += 1
    pop.species = [sp for sp in pop.species if sp.members]
    for sp in pop.species:
        sp.representative = sp.members[0].copy()
    return pop


def share_fitness(pop: Population) -> Population:
    """Divides each genome's fitness by its species size.

    Raises:
        ValueError: If any genome is unevaluated or unassigned.
    """
    assigned = 0
    for sp in pop.species:
        size = len(sp.members)
        for genome in sp.members:
            if genome.fitness is None:
                raise ValueError("cannot share fitness of an unevaluated genome")
            genome.adjusted_fitness = genome.fitness / size
            assigned += 1
    if assigned != len(pop.genomes):
        raise ValueError("every genome must belong to a species before sharing")
    return pop


def crossover(parent_a: Genome, parent_b: Genome, rng: np.random.Generator) -> Genome:
    """Recombines two genomes aligned by innovation number.

    Matching genes come from either parent at random; disjoint and
    excess genes come from the fitter parent (per-gene coin flips at
    equal fitness).  A gene disabled in either parent stays disabled in
    the child with probability 0.75.  Sigma follows the fitter parent
    (mean at equal fitness).

    Raises:
        ValueError: If either parent is unevaluated.
    """
    if parent_a.fitness is None or parent_b.fitness is None:
        raise ValueError("crossover requires evaluated parents")
    if parent_a.fitness > parent_b.fitness:
        lead = 1
        sigma = parent_a.sigma
    elif parent_b.fitness > parent_a.fitness:
        lead = -1
        sigma = parent_b.sigma
    else:
        lead = 0
        sigma = 0.5 * (parent_a.sigma + parent_b.sigma)

    def inherit(gene: ConnectionGene, disabled_somewhere: bool) -> ConnectionGene:
        child_gene = gene.copy()
        if disabled_somewhere:
            # 75% chance of remaining disabled.
            child_gene.enabled = rng.random() < 0.25
        else:
            child_gene.enabled = True
        return child_gene

    ca, cb = parent_a.connections, parent_b.connections
    ia = ib = 0
    child_conns: list[ConnectionGene] = []
    while ia < len(ca) or ib < len(cb):
        ga = ca[ia] if ia < len(ca) else None
        gb = cb[ib] if ib < len(cb) else None
        if ga is not None and gb is not None and ga.innovation == gb.innovation:
            pick = ga if rng.random() < 0.5 else gb
            child_conns.append(inherit(pick, not (ga.enabled and gb.enabled)))
            ia += 1
            ib += 1
        elif gb is None or (ga is not None and ga.innovation < gb.innovation):
            if lead == 1 or (lead == 0 and rng.random() < 0.5):
                child_conns.append(inherit(ga, not ga.enabled))
            ia += 1
        else:
            if lead == -1 or (lead == 0 and rng.random() < 0.5):
                child_conns.append(inherit(gb, not gb.enabled))
            ib += 1

    node_by_id: dict[int, NodeGene] = {n.id: n for n in parent_b.nodes}
    node_by_id.update({n.id: n for n in parent_a.nodes})
    io_source = parent_b if lead == -1 else parent_a
    needed = {n.id for n in io_source.nodes if n.role != "hidden"}
    for gene in child_conns:
        needed.add(gene.source)
        needed.add(gene.target)
    child_nodes = [node_by_id[i].copy() for i in sorted(needed)]
    return Genome(nodes=child_nodes, connections=child_conns, sigma=sigma)


def mutate(
    genome: Genome,
    rng: np.random.Generator,
    rates: EvolutionConfig,
    innovations: Innovations,
) -> Genome:
    """Applies structural, weight and sigma mutations in place.

    Each mutation class triggers independently: node insertion splits a
    random enabled connection (in-weight 1.0, out-weight inherited,
    original disabled); connection addition wires a previously absent
    directed pair (self-loops and recurrent edges allowed, input nodes
    never targets); the weight pass perturbs every weight by a uniform
    step or replaces it outright; spiking genomes scale sigma by a
    bounded log-uniform factor.
    """
    if rng.random() < rates.p_add_node:
        _mutate_add_node(genome, rng, innovations)
    if rng.random() < rates.p_add_conn:
        _mutate_add_connection(genome, rng, innovations)
    if rng.random() < rates.p_weight:
        limit = rates.weight_limit
        for conn in genome.connections:
            if rng.random() < rates.p_weight_replace:
                conn.weight = rng.uniform(-limit, limit)
            else:
                conn.weight = conn.weight + rng.uniform(-rates.weight_perturb, rates.weight_perturb)
                if conn.weight > limit:
                    conn.weight = limit
                elif conn.weight < -limit:
                    conn.weight = -limit
    if genome.kind == "spiking" and rng.random() < rates.p_sigma:
        genome.sigma *= math.exp(rng.uniform(-rates.sigma_step, rates.sigma_step))
        genome.sigma = min(max(genome.sigma, rates.sigma_min), rates.sigma_max)
    return genome


def _mutate_add_node(genome: Genome, rng: np.random.Generator, innovations: Innovations) -> None:
    enabled = [c for c in genome.connections if c.enabled]
    if not enabled:
        return
    conn = enabled[rng.integers(len(enabled))]
    node_id = innovations.split_node(conn.source, conn.target)
    if any(n.id == node_id for n in genome.nodes):
        # This genome already holds the registered split (the connection
        # was re-enabled and split again); allocate an unshared id.
        node_id = innovations.fresh_node()
    genome.nodes.append(NodeGene(node_id, "hidden", genome.kind))
    conn.enabled = False
    genome.connections.append(
        ConnectionGene(innovations.connection(conn.source, node_id), conn.source, node_id, 1.0)
    )
    genome.connections.append(
        ConnectionGene(innovations.connection(node_id, conn.target), node_id, conn.target, conn.weight)
    )
    genome.connections.sort(key=lambda c: c.innovation)


def _mutate_add_connection(
    genome: Genome, rng: np.random.Generator, innovations: Innovations
) -> None:
    # The force output never feeds back into the network: the actuator
    # command is a readout, not a state variable, so new edges exclude
    # output sources just as they exclude input targets.
    sources = [n.id for n in genome.nodes if n.role != "output"]
    targets = [n.id for n in genome.nodes if n.role != "input"]
    if not sources or not targets:
        return
    existing = {(c.source, c.target) for c in genome.connections}
    for _ in range(_ADD_CONN_TRIES):
        source = sources[rng.integers(len(sources))]
        target = targets[rng.integers(len(targets))]
        if (source, target) in existing:
            continue
        genome.connections.append(
            ConnectionGene(
                innovations.connection(source, target),
                source,
                target,
                rng.uniform(-_NEW_WEIGHT_RANGE, _NEW_WEIGHT_RANGE),
            )
        )
        genome.connections.sort(key=lambda c: c.innovation)
        return


def reproduce(pop: Population, rng: np.random.Generator, cfg: EvolutionConfig) -> Population:
    """Builds the next generation in place and returns the population.

    Offspring quotas are proportional to species' total adjusted fitness
    (largest-remainder rounding to the exact population size; remainder
    ties favour the smaller integer share, then the older species).
    Species stale past the limit get zero quota unless they hold the
    population champion.  Within each species the champion is duplicated
    unmutated when the species has more members than the elitism cutoff,
    and the remaining quota is filled by crossover or cloning over the
    top parent fraction, followed by mutation.  All parents are
    discarded.

    Raises:
        ValueError: If the population or any species member list is empty
            or fitness sharing has not run.
    """
    if not pop.genomes or not pop.species:
        raise ValueError("cannot reproduce an empty or unspeciated population")
    index_of = {id(g): i for i, g in enumerate(pop.genomes)}
    for genome in pop.genomes:
        if genome.fitness is None or genome.adjusted_fitness is None:
            raise ValueError("reproduction requires shared fitness")

    champion = min(pop.genomes, key=lambda g: (-g.fitness, index_of[id(g)]))
    species = sorted(pop.species, key=lambda sp: sp.id)
    for sp in species:
        best = max(g.fitness for g in sp.members)
        if best > sp.best_fitness_ever:
            sp.best_fitness_ever = best
            sp.staleness = 0
        else:
            sp.staleness += 1

    totals = []
    for sp in species:
        stale = sp.staleness >= cfg.staleness_limit
        exempt = any(g is champion for g in sp.members)
        if stale and not exempt:
            totals.append(0.0)
        else:
            totals.append(sum(g.adjusted_fitness for g in sp.members))
    quotas = _largest_remainder(totals, cfg.population_size, [sp.id for sp in species])

    offspring: list[Genome] = []
    for sp, quota in zip(species, quotas):
        if quota == 0:
            continue
        ranked = sorted(sp.members, key=lambda g: (-g.fitness, index_of[id(g)]))
        n_parents = max(1, math.ceil(cfg.parent_fraction * len(ranked)))
        parents = ranked[:n_parents]
        produced: list[Genome] = []
        if len(sp.members) > cfg.elite_species_size:
            elite = ranked[0].copy()
            produced.append(elite)
        while len(produced) < quota:
            if rng.random() < cfg.p_crossover:
                pa = parents[rng.integers(len(parents))]
                pb = parents[rng.integers(len(parents))]
                child = crossover(pa, pb, rng)
            else:
                child = parents[rng.integers(len(parents))].copy()
            mutate(child, rng, cfg, pop.innovations)
            produced.append(child)
        offspring.extend(produced[:quota])

    for genome in offspring:
        genome.fitness = None
        genome.adjusted_fitness = None
        genome.gid = pop.next_gid
        pop.next_gid += 1
    pop.genomes = offspring
    pop.generation += 1
    return pop


def _largest_remainder(totals: list[float], size: int, ids: list[int]) -> list[int]:
    """Proportional integer quotas summing exactly to ``size``."""
    weight = sum(totals)
    if weight <= 0.0:
        # Degenerate: nothing earned fitness; share evenly.
        shares = [size / len(totals)] * len(totals)
    else:
        shares = [t / weight * size for t in totals]
    floors = [math.floor(s) for s in shares]
    seats = size - sum(floors)
    order = sorted(
        range(len(shares)),
        key=lambda i: (-(shares[i] - floors[i]), floors[i], ids[i]),
    )
    for i in order[:seats]:
        floors[i] += 1
    return floors


def new_population(
    n_inputs: int,
    n_outputs: int,
    kind: str,
    size: int,
    rng: np.random.Generator,
) -> Population:
    """Creates generation 0: ``size`` minimal genomes and their registry."""
    innovations = Innovations()
    genomes = [minimal_genome(n_inputs, n_outputs, kind, rng, innovations) for _ in range(size)]
    for gid, genome in enumerate(genomes):
        genome.gid = gid
    return Population(genomes=genomes, innovations=innovations, next_gid=size)


def decode(genome: Genome, codec: CodecConfig) -> SpikingNetwork | SigmoidNetwork:
    """Instantiates the phenotype for a genome.

    Slots are assigned input nodes first, then outputs, then hidden
    nodes, each group in id order.  Only enabled connections appear.
    For the continuous decoder the output node is a pure readout: its
    incoming connection weights form the weighted rate sum and it has no
    membrane dynamics.  Unreachable structure is allowed.
    """
    inputs = sorted((n for n in genome.nodes if n.role == "input"), key=lambda n: n.id)
    outputs = sorted((n for n in genome.nodes if n.role == "output"), key=lambda n: n.id)
    hidden = sorted((n for n in genome.nodes if n.role == "hidden"), key=lambda n: n.id)
    if not inputs or not outputs:
        raise ValueError("genome needs input and output nodes")
    slot_of = {n.id: i for i, n in enumerate(inputs + outputs + hidden)}
    n_inputs = len(inputs)
    n_slots = len(slot_of)
    output_slots = [slot_of[n.id] for n in outputs]
    enabled = [c for c in genome.connections if c.enabled]

    if genome.kind == "sigmoid":
        dynamic = [False] * n_inputs + [True] * (n_slots - n_inputs)
        synapses = [(slot_of[c.source], slot_of[c.target], c.weight) for c in enabled]
        return SigmoidNetwork(
            n_inputs,
            n_slots,
            dynamic,
            synapses,
            output_slots,
            decoder=codec.decoder,
            force_mag=codec.force_mag,
        )

    readout = codec.decoder == "continuous"
    dynamic = [False] * n_inputs + [not readout] * len(outputs) + [True] * len(hidden)
    output_set = set(output_slots)
    synapses = []
    decoder_weights = []
    for conn in enabled:
        src, dst = slot_of[conn.source], slot_of[conn.target]
        if readout and dst in output_set:
            decoder_weights.append((src, conn.weight))
        elif readout and src in output_set:
            # The readout never spikes; edges leaving it are inert.
            continue
        else:
            synapses.append((src, dst, conn.weight))
    return SpikingNetwork(
        n_inputs,
        n_slots,
        dynamic,
        synapses,
        codec,
        output_slots,
        decoder_weights=decoder_weights or None,
        sigma=genome.sigma,
    )


def serialize_genome(genome: Genome) -> str:
    """Renders a genome as line-oriented text.

    Header ``genome <id> sigma <s> fitness <f>`` (``none`` for an
    unevaluated genome), then one ``node`` line per node gene and one
    ``conn`` line per connection gene.  Floats use repr so parsing
    recovers them exactly.
    """
    fitness = "none" if genome.fitness is None else repr(float(genome.fitness))
    lines = [f"genome {genome.gid} sigma {repr(float(genome.sigma))} fitness {fitness}"]
    for node in genome.nodes:
        lines.append(f"node {node.id} {node.role} {node.kind}")
    for conn in genome.connections:
        lines.append(
            f"conn {conn.innovation} {conn.source} {conn.target} "
            f"{repr(float(conn.weight))} {1 if conn.enabled else 0}"
        )
    return "\n".join(lines) + "\n"


def parse_genome(text: str) -> Genome:
    """Parses ``serialize_genome`` output back into a Genome.

    Raises:
        ValueError: On any malformed line or missing header.
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty genome text")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "genome" or head[2] != "sigma" or head[4] != "fitness":
        raise ValueError(f"malformed genome header: {lines[0]!r}")
    genome = Genome(
        nodes=[],
        connections=[],
        sigma=float(head[3]),
        fitness=None if head[5] == "none" else float(head[5]),
        gid=int(head[1]),
    )
    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "node" and len(parts) == 4:
            role, kind = parts[2], parts[3]
            if role not in NODE_ROLES or kind not in GENOME_KINDS:
                raise ValueError(f"malformed node line: {line!r}")
            genome.nodes.append(NodeGene(int(parts[1]), role, kind))
        elif parts[0] == "conn" and len(parts) == 6:
            if parts[5] not in ("0", "1"):
                raise ValueError(f"malformed enabled flag: {line!r}")
            genome.connections.append(
                ConnectionGene(
                    innovation=int(parts[1]),
                    source=int(parts[2]),
                    target=int(parts[3]),
                    weight=float(parts[4]),
                    enabled=parts[5] == "1",
                )
            )
        else:
            raise ValueError(f"unrecognized genome line: {line!r}")
    return genome


__all__ = [
    "NodeGene",
    "ConnectionGene",
    "Genome",
    "Species",
    "Innovations",
    "Population",
    "EvolutionConfig",
    "minimal_genome",
    "compatibility",
    "speciate",
    "share_fitness",
    "crossover",
    "mutate",
    "reproduce",
    "new_population",
    "decode",
    "serialize_genome",
    "parse_genome",
]
