// Section texts are short summaries written for this corpus.

use super::{CLOUD, EIP, SECURITY};

pub struct SeedPattern {
    pub language: &'static str,
    pub name: &'static str,
    pub icon: Option<&'static str>,
    pub sections: &'static [(&'static str, &'static str)],
}

pub struct SeedRelation {
    pub owner: &'static str,
    pub source: (&'static str, &'static str),
    pub target: (&'static str, &'static str),
    pub ty: &'static str,
    pub description: &'static str,
    /// Referenced by the case-study view.
    pub in_view: bool,
}

pub struct SeedViewRelation {
    pub source: (&'static str, &'static str),
    pub target: (&'static str, &'static str),
    pub ty: &'static str,
    pub description: &'static str,
}

pub const PATTERNS: &[SeedPattern] = &[
    SeedPattern {
        language: CLOUD,
        name: "Public Cloud",
        icon: Some("icons/public-cloud.svg"),
        sections: &[
            ("problem", "An organization needs IT resources on short notice and cannot predict how many it will need."),
            ("context", "Workloads vary strongly over time. Owning enough hardware for the peak leaves most of it idle."),
            ("solution", "Rent resources from a provider that serves many customers from one shared, self-service infrastructure and bills by use. The provider handles capacity planning across all tenants."),
            ("variations", "Private, community and hybrid offerings restrict or combine who may share the infrastructure."),
        ],
    },
    SeedPattern {
        language: CLOUD,
        name: "Infrastructure as a Service",
        icon: Some("icons/iaas.svg"),
        sections: &[
            ("problem", "Applications need servers, storage and networks, but operating the physical data center is not the team's business."),
            ("context", "Teams want full control over operating systems and middleware while avoiding hardware procurement."),
            ("solution", "Offer virtual servers, block storage and virtual networks through an API. Customers provision and release them on demand and manage everything above the hypervisor."),
        ],
    },
    SeedPattern {
        language: CLOUD,
        name: "Elastic Infrastructure",
        icon: None,
        sections: &[
            ("problem", "Resources must be added and removed quickly and automatically as demand changes."),
            ("context", "Manual provisioning takes too long to follow load peaks."),
            ("solution", "Provide a dynamically sized pool of virtual resources with a self-service management interface. Monitoring and automation scripts use that interface to grow or shrink the pool without human involvement."),
        ],
    },
    SeedPattern {
        language: CLOUD,
        name: "Elastic Queue",
        icon: Some("icons/elastic-queue.svg"),
        sections: &[
            ("problem", "The number of workers consuming a queue should match the amount of queued work."),
            ("context", "Requests arrive asynchronously through messaging. Too few workers cause backlog, too many waste money."),
            ("solution", "Watch the queue length and the age of its messages. When thresholds are crossed, start or stop processing instances so that capacity follows the backlog."),
        ],
    },
    SeedPattern {
        language: CLOUD,
        name: "Processing Component",
        icon: Some("icons/processing-component.svg"),
        sections: &[
            ("problem", "Compute-heavy application logic must scale out independently from the rest of the application."),
            ("context", "Processing requests arrive in bursts. Work should be distributed over several identical instances."),
            ("solution", "Split processing into separate components that receive tasks as messages. Several instances read from the same queue and each message is handled by exactly one of them."),
            ("variations", "Components may run as plain virtual servers or as managed worker roles."),
        ],
    },
    SeedPattern {
        language: CLOUD,
        name: "Stateless Component",
        icon: None,
        sections: &[
            ("problem", "Instances of a component are added and removed at any time, and their local state would be lost."),
            ("context", "Elastic scaling and failures make individual instances short-lived."),
            ("solution", "Keep no session or application state inside the component. Store state externally, for example in storage offerings or in the messages themselves, so any instance can handle any request."),
        ],
    },
    SeedPattern {
        language: CLOUD,
        name: "Message-oriented Middleware",
        icon: Some("icons/message-oriented-middleware.svg"),
        sections: &[
            ("problem", "Distributed application components must communicate without depending on each other's availability."),
            ("context", "Components are scaled independently and may fail or restart."),
            ("solution", "Exchange information through a middleware that stores and forwards messages via named channels. Senders and receivers only share the channel and the message format."),
        ],
    },
    SeedPattern {
        language: CLOUD,
        name: "User Interface Component",
        icon: None,
        sections: &[
            ("problem", "Users need an interactive interface, while the backend scales and changes on its own schedule."),
            ("context", "Human users expect quick feedback even while backend work is queued."),
            ("solution", "Provide the interface as a separate component that accepts user input and hands longer tasks to backend components asynchronously. Keep it stateless so it scales with the number of users."),
        ],
    },
    SeedPattern {
        language: EIP,
        name: "Message Channel",
        icon: None,
        sections: &[
            ("problem", "How can one application send data to another without knowing where or when it is consumed?"),
            ("forces", "Direct calls couple sender and receiver in time and location."),
            ("solution", "Connect the applications through a named channel provided by the messaging system. The sender writes messages to the channel and the receiver reads them from it."),
            ("next", "Decide between point-to-point and publish-subscribe delivery."),
        ],
    },
    SeedPattern {
        language: EIP,
        name: "Point-to-Point Channel",
        icon: None,
        sections: &[
            ("problem", "How can the sender make sure that exactly one receiver processes a given message?"),
            ("context", "Several receivers may listen on the same channel."),
            ("solution", "Use a channel that delivers each message to only one of its consumers. If several consumers compete, the channel still hands every message to a single one."),
        ],
    },
    SeedPattern {
        language: EIP,
        name: "Competing Consumers",
        icon: None,
        sections: &[
            ("problem", "How can a client process messages concurrently when one consumer cannot keep up?"),
            ("forces", "Adding consumers should not require changes to the sender or lead to duplicate processing."),
            ("solution", "Attach multiple consumers to one point-to-point channel. They compete for messages, and the channel guarantees each message reaches one consumer only."),
            ("sketch", "sender -> channel -> {consumer 1, consumer 2, consumer n}"),
        ],
    },
    SeedPattern {
        language: EIP,
        name: "Message Dispatcher",
        icon: None,
        sections: &[
            ("problem", "How can several consumers on one channel coordinate which of them handles a message?"),
            ("context", "Consumers may be specialized, or the messaging system may not balance load well."),
            ("solution", "Let a single dispatcher read from the channel and pass each message to one of a set of performers. The dispatcher decides the assignment, for example by message type or availability."),
        ],
    },
    SeedPattern {
        language: EIP,
        name: "Polling Consumer",
        icon: None,
        sections: &[
            ("problem", "How can an application consume messages only when it is ready for them?"),
            ("solution", "The consumer explicitly asks the channel for the next message, processes it and then asks again. The application controls its own pace."),
        ],
    },
    SeedPattern {
        language: EIP,
        name: "Event-Driven Consumer",
        icon: None,
        sections: &[
            ("problem", "How can an application consume messages as soon as they become available?"),
            ("solution", "Register a callback with the messaging system. The system invokes it whenever a message arrives on the channel, so the consumer does not poll."),
        ],
    },
    SeedPattern {
        language: SECURITY,
        name: "Secure Channel",
        icon: None,
        sections: &[
            ("problem", "Data exchanged over a public network can be read or modified in transit."),
            ("context", "Two parties communicate across networks they do not control."),
            ("forces", "Protection must not require changes to every application message format."),
            ("solution", "Establish an encrypted and authenticated connection between the endpoints before exchanging data. All traffic passes through this protected connection."),
            ("consequences", "Confidentiality and integrity in transit improve at the cost of cryptographic overhead and key management."),
            ("see-also", "Authenticator, Protected Entry Points."),
        ],
    },
];

pub const LANGUAGE_RELATIONS: &[SeedRelation] = &[
    SeedRelation {
        owner: CLOUD,
        source: (CLOUD, "public-cloud"),
        target: (CLOUD, "infrastructure-as-a-service"),
        ty: "see-also",
        description: "The public cloud pattern lists the service models, infrastructure as a service among them.",
        in_view: false,
    },
    SeedRelation {
        owner: CLOUD,
        source: (CLOUD, "processing-component"),
        target: (EIP, "competing-consumers"),
        ty: "implemented-by",
        description: "Processing component instances read from a shared queue, which the processing component pattern names as competing consumers.",
        in_view: true,
    },
    SeedRelation {
        owner: CLOUD,
        source: (CLOUD, "message-oriented-middleware"),
        target: (EIP, "message-channel"),
        ty: "refers-to",
        description: "The middleware pattern describes its channels with the message channel pattern of the integration language.",
        in_view: false,
    },
    SeedRelation {
        owner: CLOUD,
        source: (CLOUD, "elastic-queue"),
        target: (CLOUD, "processing-component"),
        ty: "refers-to",
        description: "An elastic queue adjusts the number of processing component instances.",
        in_view: true,
    },
    SeedRelation {
        owner: CLOUD,
        source: (CLOUD, "processing-component"),
        target: (CLOUD, "stateless-component"),
        ty: "implemented-by",
        description: "Processing components are kept stateless so that instances can be removed at any time.",
        in_view: true,
    },
    SeedRelation {
        owner: EIP,
        source: (EIP, "competing-consumers"),
        target: (EIP, "polling-consumer"),
        ty: "implemented-as",
        description: "Each competing consumer can fetch messages by polling.",
        in_view: true,
    },
    SeedRelation {
        owner: EIP,
        source: (EIP, "competing-consumers"),
        target: (EIP, "event-driven-consumer"),
        ty: "implemented-as",
        description: "Each competing consumer can receive messages through callbacks.",
        in_view: true,
    },
    SeedRelation {
        owner: EIP,
        source: (EIP, "competing-consumers"),
        target: (EIP, "point-to-point-channel"),
        ty: "see-also",
        description: "Competing consumers rely on a point-to-point channel to avoid duplicate processing.",
        in_view: true,
    },
    SeedRelation {
        owner: EIP,
        source: (EIP, "message-dispatcher"),
        target: (EIP, "competing-consumers"),
        ty: "delegates-to",
        description: "A dispatcher is an alternative way to coordinate consumers that would otherwise compete.",
        in_view: true,
    },
];

pub const VIEW_RELATIONS: &[SeedViewRelation] = &[
    SeedViewRelation {
        source: (EIP, "point-to-point-channel"),
        target: (SECURITY, "secure-channel"),
        ty: "implements",
        description: "Messages in a secure elastic application travel over a channel that must itself be protected.",
    },
    SeedViewRelation {
        source: (EIP, "message-dispatcher"),
        target: (CLOUD, "processing-component"),
        ty: "delegates-to",
        description: "Editorial choice: the dispatcher hands each message to one processing component instance.",
    },
    SeedViewRelation {
        source: (CLOUD, "message-oriented-middleware"),
        target: (EIP, "point-to-point-channel"),
        ty: "provides",
        description: "Editorial choice: the middleware supplies the channels, the point-to-point channel among them.",
    },
];
