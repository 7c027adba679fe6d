/** Minimal element builder so screens read declaratively without a framework. */

type Child = Node | string | null | undefined;

export interface Attrs {
  className?: string;
  id?: string;
  type?: string;
  value?: string;
  placeholder?: string;
  href?: string;
  target?: string;
  rel?: string;
  name?: string;
  title?: string;
  disabled?: boolean;
  min?: string;
  max?: string;
  onClick?: (event: Event) => void;
  onSubmit?: (event: Event) => void;
  onChange?: (event: Event) => void;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (attrs.className) node.className = attrs.className;
  if (attrs.id) node.id = attrs.id;
  if (attrs.title) node.title = attrs.title;
  if (node instanceof HTMLInputElement) {
    if (attrs.type) node.type = attrs.type;
    if (attrs.value !== undefined) node.value = attrs.value;
    if (attrs.placeholder) node.placeholder = attrs.placeholder;
    if (attrs.name) node.name = attrs.name;
    if (attrs.min) node.min = attrs.min;
    if (attrs.max) node.max = attrs.max;
  }
  if (node instanceof HTMLButtonElement && attrs.type) {
    node.type = attrs.type as "button" | "submit" | "reset";
  }
  if (node instanceof HTMLAnchorElement) {
    if (attrs.href) node.href = attrs.href;
    if (attrs.target) node.target = attrs.target;
    if (attrs.rel) node.rel = attrs.rel;
  }
  if (attrs.disabled && "disabled" in node) {
    (node as HTMLButtonElement).disabled = true;
  }
  if (attrs.onClick) node.addEventListener("click", attrs.onClick);
  if (attrs.onSubmit) node.addEventListener("submit", attrs.onSubmit);
  if (attrs.onChange) node.addEventListener("change", attrs.onChange);
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function labelled(labelText: string, input: HTMLElement): HTMLElement {
  return el("label", { className: "field" }, el("span", {}, labelText), input);
}
