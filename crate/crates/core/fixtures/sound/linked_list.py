class Node:
    def __init__(self, value, rest):
        self.value = value
        self.rest = rest
    def length(self):
        if self.rest == None:
            return 1
        return 1 + self.rest.length()

def build(n):
    head = None
    i = 0
    while i < n:
        head = Node(i, head)
        i += 1
    return head

def main():
    lst = build(4)
    print(lst.length())
